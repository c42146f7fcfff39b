#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gadgetforge/csv.hpp"
#include "gadgetforge/errors.hpp"
#include "gadgetforge/target_io.hpp"

using namespace gadgetforge;
namespace fs = std::filesystem;

namespace {

PauliString P(const char* s) { return PauliString::parse(s); }

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / "gadgetforge_io_test";
    fs::create_directories(d);
    return d / name;
}

const char* fig7_json = R"({
  "n_qubits": 3,
  "terms": [
    {"coeff": 0.1, "paulis": [[0, "X"], [1, "Z"], [2, "Z"]]},
    {"coeff": -0.2, "paulis": [[0, "X"], [1, "X"], [2, "Z"]]},
    {"coeff": 0.05, "paulis": [[1, "Z"]]}
  ],
  "interactions": [
    {"term": 0, "split": [[0], [1], [2]]},
    {"term": 1, "split": [[0], [1], [2]]}
  ]
})";

} // namespace

TEST(TargetIo, ParsesInteractionsAndRemainder)
{
    const TargetSpec t = parse_target(fig7_json);
    ASSERT_EQ(t.interactions.size(), 2u);
    EXPECT_DOUBLE_EQ(t.interactions[1].alpha, -0.2);
    EXPECT_EQ(t.interactions[1].factors[1], P("X1"));
    EXPECT_EQ(t.h_else, OperatorSum::term(3, 0.05, P("Z1")));
}

TEST(TargetIo, RoundTrip)
{
    const TargetSpec t = parse_target(fig7_json);
    const TargetSpec u = parse_target(target_to_json(t));
    EXPECT_TRUE(same_target(t, u));
    EXPECT_EQ(target_to_json(t), target_to_json(u));

    const fs::path p = scratch("fig7.json");
    save_target(t, p.string());
    EXPECT_TRUE(same_target(load_target(p.string()), t));

    const OperatorSum op = t.operator_sum();
    EXPECT_EQ(parse_operator(operator_to_json(op)), op);
}

TEST(TargetIo, EmptyTermsIsZeroOperator)
{
    const TargetSpec t = parse_target(R"({"n_qubits": 2, "terms": []})");
    EXPECT_TRUE(t.interactions.empty());
    EXPECT_TRUE(t.h_else.empty());
}

TEST(TargetIo, SchemaErrorsNameTheField)
{
    auto msg = [](const char* text) {
        try {
            parse_target(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("accepted");
    };
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": "a", "paulis": []}]})").find("terms[0].coeff"),
              std::string::npos);
    EXPECT_NE(msg(R"({"terms": []})").find("n_qubits"), std::string::npos);
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": 1, "paulis": [[2, "X"]]}]})").find("out of range"),
              std::string::npos);
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": 1, "paulis": [[0, "W"]]}]})").find("axis"),
              std::string::npos);
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": 1, "paulis": [[0, "X"], [0, "Z"]]}]})").find("repeated"),
              std::string::npos);
    // overlapping factor groups
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": 1, "paulis": [[0, "X"], [1, "Z"]]}],
                      "interactions": [{"term": 0, "split": [[0, 1], [1]]}]})")
                  .find("overlap"),
              std::string::npos);
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": 1, "paulis": [[0, "X"], [1, "Z"]]}],
                      "interactions": [{"term": 0, "split": [[0]]}]})")
                  .find("cover"),
              std::string::npos);
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [{"coeff": 1, "paulis": [[0, "X"], [1, "Z"]]}],
                      "interactions": [{"term": 0, "split": [[0], [1]]}, {"term": 0, "split": [[0], [1]]}]})")
                  .find("twice"),
              std::string::npos);
    EXPECT_NE(msg(R"({"n_qubits": 2, "terms": [], "interactions": [{"term": 3, "split": [[0]]}]})").find("range"),
              std::string::npos);
    EXPECT_NE(msg("{\"n_qubits\": 2,\n \"terms\": [}").find("line 2"), std::string::npos);
    EXPECT_THROW(load_target("/nonexistent/target.json"), ValidationError);
}

TEST(Csv, Formatting)
{
    EXPECT_EQ(format_number(43.05), "43.05");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(format_number(NAN), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");

    CsvTable t({"alpha", "n", "label"});
    t.add_row({0.5, 3LL, std::string("a,b")});
    t.add_row({-1.0, 0LL, std::string("say \"hi\"")});
    EXPECT_EQ(t.render(), "alpha,n,label\n0.5,3,\"a,b\"\n-1,0,\"say \"\"hi\"\"\"\n");
    EXPECT_THROW(t.add_row({1.0}), ValidationError);
    EXPECT_THROW(CsvTable({}), ValidationError);
}

TEST(Csv, AtomicWrite)
{
    const fs::path p = scratch("table.csv");
    CsvTable t({"x"});
    t.add_row({1.0});
    write_csv(t, p.string());
    EXPECT_EQ(slurp(p), "x\n1\n");
    EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
    EXPECT_THROW(write_csv(t, "/nonexistent/dir/t.csv"), ValidationError);
}
