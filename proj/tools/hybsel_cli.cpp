// Command-line driver for the hybsel benchmarks:
//
//   hybsel gen-text          write a synthetic text to a file
//   hybsel build             build a queryable structure file from a text
//   hybsel bench-plcp        benchmark sampled-lcp queries over a text
//   hybsel bench-bwt-select  benchmark select on a wavelet tree of the BWT
//
// Inputs come from --input FILE or from the synthetic generator via
// --synthetic {random,repetitive} --size N [--mutation-rate R] --seed S.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hybsel/bench.hpp>
#include <hybsel/textgen.hpp>

namespace {

struct input_options {
    std::string input_path;
    std::string synthetic;  // "random" or "repetitive"
    uint64_t size = 1 << 20;
    double mutation_rate = 0.01;
    uint32_t sigma = 4;
    uint64_t seed = 0;
};

void add_input_flags(CLI::App* cmd, input_options& in) {
    cmd->add_option("--input", in.input_path, "input text file (bytes; 0x00 only as final sentinel)");
    cmd->add_option("--synthetic", in.synthetic, "synthetic input kind")
        ->check(CLI::IsMember({"random", "repetitive"}));
    cmd->add_option("--size", in.size, "synthetic input size in bytes");
    cmd->add_option("--mutation-rate", in.mutation_rate, "per-byte mutation rate of repetitive inputs");
    cmd->add_option("--sigma", in.sigma, "synthetic alphabet size");
    cmd->add_option("--seed", in.seed, "seed for input generation and query sampling");
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open input file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return bytes;
}

std::pair<std::vector<uint8_t>, std::string> resolve_input(const input_options& in) {
    if (!in.input_path.empty() && !in.synthetic.empty())
        throw std::runtime_error("pass either --input or --synthetic, not both");
    if (!in.input_path.empty()) {
        auto bytes = read_file(in.input_path);
        if (bytes.size() > hybsel::k_input_cap_bytes)
            throw std::runtime_error("input exceeds the 64 MiB cap");
        std::string name = in.input_path.substr(in.input_path.find_last_of('/') + 1);
        return {std::move(bytes), std::move(name)};
    }
    if (in.synthetic.empty()) throw std::runtime_error("no input: pass --input or --synthetic");
    auto kind = in.synthetic == "random" ? hybsel::text_kind::random : hybsel::text_kind::repetitive;
    auto bytes = hybsel::gen_synthetic_text(kind, in.size, in.seed, in.mutation_rate, in.sigma);
    std::ostringstream name;
    name << in.synthetic << '-' << in.size;
    return {std::move(bytes), name.str()};
}

void emit_csv(const std::string& csv_path, const hybsel::bench_record& rec) {
    if (csv_path == "-") {
        hybsel::write_csv_header(std::cout);
        hybsel::write_csv_row(std::cout, rec);
        return;
    }
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot open CSV output: " + csv_path);
    hybsel::write_csv_header(os);
    hybsel::write_csv_row(os, rec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid-bitvector select benchmarks"};
    app.require_subcommand(1);

    input_options in;
    std::string out_path;
    std::string csv_path = "-";
    std::string structure = "plcp";
    hybsel::bench_config cfg;

    auto* gen = app.add_subcommand("gen-text", "write a synthetic text to a file");
    add_input_flags(gen, in);
    gen->add_option("--out", out_path, "output path")->required();

    auto add_structure_flags = [&](CLI::App* cmd, bool with_shape) {
        add_input_flags(cmd, in);
        cmd->add_option("--backend", cfg.backend, "bitvector backend")
            ->check(CLI::IsMember({"hyb", "plain"}));
        cmd->add_option("--bs", cfg.blocks_per_superblock, "blocks per superblock (hyb backend)")
            ->check(CLI::IsMember({"8", "16", "32", "64"}));
        if (with_shape)
            cmd->add_option("--shape", cfg.shape, "wavelet tree shape")
                ->check(CLI::IsMember({"huff", "blcd"}));
    };

    auto* build = app.add_subcommand("build", "build a structure file from a text");
    add_structure_flags(build, true);
    build->add_option("--structure", structure, "structure to build")
        ->check(CLI::IsMember({"plcp", "bwt-select"}));
    build->add_option("--out", out_path, "output path")->required();

    auto* bench_plcp_cmd = app.add_subcommand("bench-plcp", "benchmark sampled-lcp queries");
    add_structure_flags(bench_plcp_cmd, false);
    bench_plcp_cmd->add_option("--queries", cfg.queries, "timed query count");
    bench_plcp_cmd->add_option("--csv", csv_path, "CSV output path ('-' for stdout)");

    auto* bench_bwt_cmd = app.add_subcommand("bench-bwt-select", "benchmark BWT select queries");
    add_structure_flags(bench_bwt_cmd, true);
    bench_bwt_cmd->add_option("--queries", cfg.queries, "timed query count");
    bench_bwt_cmd->add_option("--csv", csv_path, "CSV output path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (in.synthetic.empty()) throw std::runtime_error("gen-text requires --synthetic");
            auto [bytes, name] = resolve_input(in);
            std::ofstream os(out_path, std::ios::binary);
            if (!os) throw std::runtime_error("cannot open output file: " + out_path);
            os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
            if (!os) throw std::runtime_error("write failed: " + out_path);
            std::cerr << "wrote " << bytes.size() << " bytes (" << name << ") to " << out_path << "\n";
            return 0;
        }

        auto [bytes, name] = resolve_input(in);
        cfg.raw = std::move(bytes);
        cfg.name = name;
        cfg.seed = in.seed;

        if (build->parsed()) {
            std::ofstream os(out_path, std::ios::binary);
            if (!os) throw std::runtime_error("cannot open output file: " + out_path);
            auto header = hybsel::build_structure_file(cfg, structure, os);
            os.flush();
            if (!os) throw std::runtime_error("write failed: " + out_path);
            std::cerr << "built " << structure << " over " << header.text_n << " bytes ("
                      << cfg.backend << ") to " << out_path << "\n";
            return 0;
        }

        hybsel::bench_record rec =
            bench_plcp_cmd->parsed() ? hybsel::bench_plcp(cfg) : hybsel::bench_bwt_select(cfg);
        std::cerr << "checksum " << rec.answers_checksum << ", build " << rec.build_ms << " ms\n";
        emit_csv(csv_path, rec);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
