// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct ToolResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ToolResult run_tool(const std::string& args) {
    const fs::path dir = fs::temp_directory_path() / "expandir_cli_io";
    fs::create_directories(dir);
    const auto out_path = dir / "stdout.txt";
    const auto err_path = dir / "stderr.txt";
    const std::string cmd = std::string(EXPANDIR_TOOL_PATH) + " " + args + " >" +
                            out_path.string() + " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    ToolResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

const fs::path kExampleDir = fs::path(EXPANDIR_TEST_DATA_DIR).parent_path().parent_path() /
                             "data" / "example";

struct Workdir {
    fs::path dir;
    Workdir() : dir(fs::temp_directory_path() / "expandir_cli_work") {
        fs::create_directories(dir);
    }
    ~Workdir() { std::error_code ec; fs::remove_all(dir, ec); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("no subcommand is a usage error") {
    const auto r = run_tool("");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("--help prints usage on stdout and exits 0") {
    const auto r = run_tool("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
}

TEST_CASE("missing required flag names the flag") {
    const auto r = run_tool("search --topics whatever.xml");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("--index") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("data errors exit 2 with file and line context") {
    Workdir wd;
    {
        std::ofstream f(wd.file("bad.jsonl"));
        f << R"({"id":"a","text":"x"})" << "\n" << "{broken\n";
    }
    const auto r = run_tool("index --docs " + wd.file("bad.jsonl") + " --out " +
                            wd.file("idx.bin"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("bad.jsonl:2") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("index, search, evaluate pipeline on the bundled example") {
    Workdir wd;
    const std::string docs = (kExampleDir / "docs.jsonl").string();
    const std::string topics = (kExampleDir / "topics.xml").string();
    const std::string qrels = (kExampleDir / "qrels.txt").string();
    const std::string vectors = (kExampleDir / "vectors.txt").string();
    const std::string index = wd.file("example.expidx");

    REQUIRE(fs::exists(docs));

    const auto r_index = run_tool("index --docs " + docs + " --stem french --out " + index);
    REQUIRE(r_index.exit_code == 0);

    // Baseline: the raw query terms never occur in the documents.
    const auto r_base = run_tool("search --index " + index + " --topics " + topics +
                                 " --mode none --run-tag base --out " + wd.file("base.run"));
    REQUIRE(r_base.exit_code == 0);
    CHECK(slurp(wd.file("base.run")).empty());

    // Expanded: neighbors (metal, concert / blues) reach the relevant docs.
    const auto r_exp = run_tool("search --index " + index + " --topics " + topics +
                                " --vectors " + vectors + " --mode local --k 2 --alpha 0.3" +
                                " --run-tag exp --out " + wd.file("exp.run"));
    REQUIRE(r_exp.exit_code == 0);
    const auto run_text = slurp(wd.file("exp.run"));
    CHECK(run_text.find("1 Q0 t1") != std::string::npos);

    const auto r_eval = run_tool("evaluate --run " + wd.file("exp.run") + " --qrels " + qrels +
                                 " --csv " + wd.file("metrics.csv"));
    CHECK(r_eval.exit_code == 0);
    CHECK(r_eval.out.find("all") != std::string::npos);
    const auto csv = slurp(wd.file("metrics.csv"));
    CHECK(csv.find("query_id,metric,value") != std::string::npos);
    CHECK(csv.find("all,p5,0.4") != std::string::npos);  // 2 relevant in top 5 per query
}

TEST_CASE("expand emits one JSON line per topic") {
    const std::string topics = (kExampleDir / "topics.xml").string();
    const std::string vectors = (kExampleDir / "vectors.txt").string();
    const auto r = run_tool("expand --topics " + topics + " --vectors " + vectors +
                            " --mode local --k 2 --alpha 0.3");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::size_t count = 0;
    std::vector<std::string> qids;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const auto parsed = nlohmann::json::parse(line);
        qids.push_back(parsed.at("qid").get<std::string>());
        CHECK(parsed.at("terms").is_array());
        CHECK(parsed.at("terms").size() >= 1);
        ++count;
    }
    CHECK(count == 2);
    CHECK(qids == std::vector<std::string>{"1", "2"});
}

TEST_CASE("replaying expanded queries reproduces the expanded run") {
    Workdir wd;
    const std::string docs = (kExampleDir / "docs.jsonl").string();
    const std::string topics = (kExampleDir / "topics.xml").string();
    const std::string vectors = (kExampleDir / "vectors.txt").string();
    const std::string index = wd.file("replay.expidx");
    REQUIRE(run_tool("index --docs " + docs + " --stem french --out " + index).exit_code == 0);

    const std::string expand_args =
        " --topics " + topics + " --vectors " + vectors + " --mode local --k 2 --alpha 0.3";
    const auto expanded = run_tool("expand" + expand_args);
    REQUIRE(expanded.exit_code == 0);
    {
        std::ofstream f(wd.file("queries.jsonl"));
        f << expanded.out;
    }

    REQUIRE(run_tool("search --index " + index + expand_args + " --run-tag t --out " +
                     wd.file("direct.run"))
                .exit_code == 0);
    REQUIRE(run_tool("search --index " + index + " --queries " + wd.file("queries.jsonl") +
                     " --run-tag t --out " + wd.file("replayed.run"))
                .exit_code == 0);
    CHECK(slurp(wd.file("direct.run")) == slurp(wd.file("replayed.run")));

    // --topics and --queries are mutually exclusive.
    const auto both = run_tool("search --index " + index + " --topics " + topics +
                               " --queries " + wd.file("queries.jsonl"));
    CHECK(both.exit_code == 1);
}

TEST_CASE("inspect-vectors reports the header and neighbors") {
    const std::string vectors = (kExampleDir / "vectors.txt").string();
    const auto r = run_tool("inspect-vectors --vectors " + vectors + " --term rock --k 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("vocab 8, dim 3") != std::string::npos);
    CHECK(r.out.find("metal") != std::string::npos);
}

TEST_CASE("sweep writes runs, tables, CSVs and a manifest") {
    Workdir wd;
    const std::string docs = (kExampleDir / "docs.jsonl").string();
    const std::string topics = (kExampleDir / "topics.xml").string();
    const std::string qrels = (kExampleDir / "qrels.txt").string();
    const std::string vectors = (kExampleDir / "vectors.txt").string();
    const std::string index = wd.file("example.expidx");
    REQUIRE(run_tool("index --docs " + docs + " --stem french --out " + index).exit_code == 0);

    {
        std::ofstream f(wd.file("sweep.json"));
        f << R"({"spaces": [{"name": "toy", "path": ")" << vectors
          << R"(", "format": "text", "preprocessed": false}],
              "modes": ["local"], "k_values": [1, 2], "alphas": [0.3]})";
    }
    const auto r = run_tool("sweep --config " + wd.file("sweep.json") + " --index " + index +
                            " --topics " + topics + " --qrels " + qrels + " --out-dir " +
                            wd.file("results"));
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(wd.dir / "results" / "baseline.run"));
    CHECK(fs::exists(wd.dir / "results" / "toy_local_k1_a0.3.run"));
    CHECK(fs::exists(wd.dir / "results" / "metric_p5.csv"));
    CHECK(fs::exists(wd.dir / "results" / "significance.csv"));
    CHECK(fs::exists(wd.dir / "results" / "manifest.json"));
    CHECK(fs::exists(wd.dir / "results" / "tables" / "p5_local_alpha0.3_by_space.txt"));

    const auto manifest = nlohmann::json::parse(slurp(wd.dir / "results" / "manifest.json"));
    CHECK(manifest.contains("config_fnv1a64"));
    CHECK(manifest.at("inputs").contains("qrels"));

    const auto p5csv = slurp(wd.dir / "results" / "metric_p5.csv");
    CHECK(p5csv.find("space,mode,k,alpha,p5") != std::string::npos);
    CHECK(p5csv.find("(baseline),none,0,0,0.0000") != std::string::npos);
}

TEST_SUITE_END();
