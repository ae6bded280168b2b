#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "u21/cli.hpp"

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = u21::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("prove emits the steinberg certificate") {
    auto r = run_cli({"prove", "--p", "3", "--f", "1", "--K", "K0", "--weight", "steinberg",
                      "--format", "json"});
    CHECK(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("command") == "prove");
    CHECK(doc.at("certificate").at("verdict") == "contradiction");
    CHECK(doc.at("certificate").at("constraints") ==
          std::vector<std::string>{"c+1", "2"});
    CHECK(doc.at("certificate").at("lambda_free") == true);
}

TEST_CASE("prove reports inconclusive weights with exit code 2") {
    auto r = run_cli({"prove", "--K", "K0", "--weight", "character"});
    CHECK(r.code == 2);
    CHECK(r.out.find("inconclusive") != std::string::npos);
}

TEST_CASE("constants table") {
    auto r = run_cli({"constants", "--char", "0,0"});
    CHECK(r.code == 0);
    CHECK(r.out == "char (0,0): c_minus=2 d_n=2 d_0=0 class=degenerate\n");
    auto rs = run_cli({"constants", "--char", "0,0", "--weight", "steinberg"});
    CHECK(rs.out == "char (0,0): c_minus=2 d_n=2 d_0=2 class=degenerate\n");
    auto csv = run_cli({"constants", "--all-chars", "--format", "csv", "--K", "K1"});
    CHECK(csv.code == 0);
    CHECK(csv.out.find("a,b,c_minus,d_n,d_0,class") == 0);
}

TEST_CASE("classify and verify subcommands pass") {
    CHECK(run_cli({"classify"}).code == 0);
    CHECK(run_cli({"classify", "--K", "K1"}).code == 0);
    CHECK(run_cli({"verify-group"}).code == 0);
    CHECK(run_cli({"verify-group", "--K", "K1"}).code == 0);
    CHECK(run_cli({"verify-module", "--K", "K1"}).code == 0);
}

TEST_CASE("eigenvalue subcommand") {
    auto r = run_cli({"eigenvalue", "--char", "0,0", "--eps-alpha", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "eigenvalue = 0\n");
    // incompatible restriction is a verification failure
    auto bad = run_cli({"eigenvalue", "--char", "1,0", "--eps-char", "0,1"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("intertwining") != std::string::npos);
}

TEST_CASE("certificates round-trip through check-cert") {
    std::string path = "cert_roundtrip_test.json";
    auto r = run_cli({"prove", "--weight", "steinberg", "--format", "json", "--out", path});
    CHECK(r.code == 0);
    auto chk = run_cli({"check-cert", path});
    CHECK(chk.code == 0);
    CHECK(chk.out.find("certificate valid") == 0);
    // corrupting the certificate is caught
    std::ifstream in(path);
    auto doc = nlohmann::json::parse(in);
    in.close();
    doc["certificate"]["steps"][1]["output"] = "(2)*f[-1]";
    std::ofstream outf(path);
    outf << doc.dump();
    outf.close();
    auto bad = run_cli({"check-cert", path});
    CHECK(bad.code == 1);
    // outright malformed files are a failure, not a crash
    std::ofstream garbage(path);
    garbage << "not json at all";
    garbage.close();
    CHECK(run_cli({"check-cert", path}).code == 1);
    std::remove(path.c_str());
}

TEST_CASE("usage errors exit with code 3") {
    CHECK(run_cli({}).code == 3);
    CHECK(run_cli({"constants", "--p", "4"}).code == 3);
    CHECK(run_cli({"constants", "--K", "K7"}).code == 3);
    CHECK(run_cli({"constants", "--char", "nope"}).code == 3);
    CHECK(run_cli({"prove", "--precision", "4"}).code == 3);  // below 2*m_max + 4
}

TEST_CASE("output is byte-stable across runs") {
    for (auto args : {std::vector<std::string>{"constants", "--all-chars", "--format", "json"},
                      std::vector<std::string>{"prove", "--weight", "steinberg", "--format", "json"},
                      std::vector<std::string>{"classify", "--K", "K1", "--format", "csv"}}) {
        auto a = run_cli(args);
        auto b = run_cli(args);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
    }
}
