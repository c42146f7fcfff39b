#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args)
{
    const std::string cmd = std::string(GADGETFORGE_BIN) + " " + args + " 2>/dev/null";
    Outcome r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int st = ::pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path dir()
{
    const fs::path d = fs::temp_directory_path() / "gadgetforge_cli_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST(Cli, SubdivisionBound)
{
    const Outcome r = run("bound --gadget subdivision --alpha 1 --eps 0.05 --helse-norm 0");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "43.05\n");
    EXPECT_EQ(run("bound --gadget par-sub --alpha 1,1 --eps 0.05").out, "652.05\n");
}

TEST(Cli, ValidationExitsOne)
{
    EXPECT_EQ(run("bound --gadget nope --alpha 1 --eps 0.05").code, 1);
    EXPECT_EQ(run("bound --gadget subdivision --alpha 1 --eps -1").code, 1);
    EXPECT_EQ(run("bound --gadget yy --alpha 1 --eps 0.05").code, 1);
    EXPECT_EQ(run("optimize --gadget 3to2 --sweep eps:1:x:3").code, 1);
    EXPECT_EQ(run("no-such-command").code, 1);

    const fs::path bad = dir() / "bad.json";
    std::ofstream(bad) << "{\"n_qubits\": 2, \"terms\": [";
    EXPECT_EQ(run("spectrum --gadget subdivision --delta 10 --target " + bad.string()).code, 1);
}

TEST(Cli, NumericalFailureExitsTwo)
{
    // without the cross compensation the error never drops below ~3
    const fs::path t = dir() / "fig8.json";
    std::ofstream(t) << R"({"n_qubits": 3,
      "terms": [{"coeff": 1, "paulis": [[0, "Z"], [1, "Z"], [2, "Z"]]},
                {"coeff": -1, "paulis": [[0, "X"], [1, "X"], [2, "X"]]}],
      "interactions": [{"term": 0, "split": [[0], [1], [2]]}, {"term": 1, "split": [[0], [1], [2]]}]})";
    EXPECT_EQ(run("optimize --gadget par-3to2 --no-v3 --eps 0.01 --target " + t.string()).code, 2);
}

TEST(Cli, Fig2OutputsAndSidecar)
{
    const fs::path a = dir() / "a" / "fig2.csv", b = dir() / "b" / "fig2.csv";
    fs::create_directories(a.parent_path());
    fs::create_directories(b.parent_path());
    ASSERT_EQ(run("fig2 --out " + a.string()).code, 0);
    ASSERT_EQ(run("fig2 --threads 1 --out " + b.string()).code, 0);

    const std::string csv = slurp(a);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,error_analytical,error_numerical");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv, slurp(b));
    EXPECT_EQ(slurp(dir() / "a" / "fig2_sigma.csv"), slurp(dir() / "b" / "fig2_sigma.csv"));

    const auto side = nlohmann::json::parse(slurp(a.string() + ".json"));
    EXPECT_EQ(side["config"]["command"], "fig2");
    EXPECT_EQ(side["grids"]["main"]["alpha"].size(), 21u);
    EXPECT_EQ(side["grids"]["sigma"]["points"], 201);
    EXPECT_TRUE(side.contains("runtime_seconds"));
    EXPECT_TRUE(side.contains("version"));
}

TEST(Cli, OptimizeSweepToStdout)
{
    const Outcome r = run("optimize --gadget subdivision --alpha 1 --sweep eps:0.01:0.1:3:log");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header.rfind("eps,delta_min,achieved_error,converged", 0), 0u);
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 3);
}
