#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "feilab/boolfn.hpp"
#include "feilab/compose.hpp"
#include "feilab/io.hpp"

using namespace feilab;

namespace {

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs the installed CLI binary with the given argument string, capturing
// both streams. Quoting is the caller's problem.
CliRun run_cli(const std::string& args) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const auto out = dir / ("feilab_test_out_" + std::to_string(++counter));
    const auto err = dir / ("feilab_test_err_" + std::to_string(counter));
    const std::string cmd = std::string(FEILAB_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = raw < 0 ? raw : WEXITSTATUS(raw);
    r.out = slurp(out);
    r.err = slurp(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze a builtin by name") {
    const CliRun r = run_cli("analyze --input WITNESS6");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["n"] == 6);
    CHECK(j["total_influence"] == 1.625);
    CHECK(j["mean"] == 0.0);
    CHECK(j["fei_ratio"].get<double>() == doctest::Approx(2.414978943349468));
    CHECK(j["fei_plus_ratio"].get<double>() == doctest::Approx(6.278945252708619));
    CHECK(j["manifest"]["subcommand"] == "analyze");
}

TEST_CASE("analyze a table file under bias") {
    const auto table = write_temp("feilab_and2.json", write_table_json(make_and(2)));
    const CliRun r =
        run_cli("analyze --input " + table.string() + " --mu 0.5,0.5");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["mu"][0] == 0.5);
    CHECK(j["uniform_entropy"].is_null());   // biased run
    CHECK(j["fei_ratio"].is_number());       // fei is still the uniform ratio
    std::filesystem::remove(table);
}

TEST_CASE("analyze a formula input") {
    const CliRun r = run_cli("analyze --input \"OR(AND(x1,x2,x3),AND(x4,x5,x6))\"");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["formula"] == "OR2(AND3(x1,x2,x3),AND3(x4,x5,x6))");
    CHECK(j["cross_checked"] == true);
    CHECK(j["root_bound_holds"] == true);
    CHECK(j["nodes"].size() == 9);
    CHECK(j["nodes"][0]["gate"] == "OR2");
    for (const auto& node : j["nodes"]) {
        CHECK(node.contains("eta"));
        CHECK(node.contains("H_ge1"));
        CHECK(node.contains("Inf"));
        CHECK(node.contains("Var"));
        CHECK(node.contains("ratio"));
    }
}

TEST_CASE("spectrum of a parity") {
    const CliRun r = run_cli("spectrum --input XOR2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["coeffs"].size() == 1);
    CHECK(j["coeffs"][0][0] == 3);
    CHECK(j["coeffs"][0][1] == 1.0);
}

TEST_CASE("duplicate variables exit with a usage error") {
    const CliRun r = run_cli("parse \"AND(x1,x1)\"");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("more than once") != std::string::npos);
    CHECK(r.err.find("1:5") != std::string::npos);
}

TEST_CASE("valid parse reports the canonical form") {
    const CliRun r = run_cli("parse \"and( x1, or(x2 ,x3 ))\"");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["formula"] == "AND2(x1,OR2(x2,x3))");
    CHECK(j["read_once"] == true);
    CHECK(j["n"] == 3);
}

TEST_CASE("bad inputs exit 1 with diagnostics on stderr") {
    CliRun r = run_cli("analyze --input \"AND(x1\"");
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error:", 0) == 0);

    const auto bad = write_temp("feilab_bad.json", "{\"n\": 2");
    r = run_cli("analyze --input " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("invalid JSON") != std::string::npos);
    std::filesystem::remove(bad);

    r = run_cli("analyze --input WITNESS6 --mu 0.1,0.2");  // wrong count
    CHECK(r.exit_code == 1);

    r = run_cli("analyze");  // missing required flag
    CHECK(r.exit_code == 1);

    r = run_cli("no-such-subcommand");
    CHECK(r.exit_code == 1);
}

TEST_CASE("help and version exit cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    const CliRun v = run_cli("--version");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("feilab 1.0.0") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across thread counts") {
    const CliRun a = run_cli("analyze --input WITNESS6 --mu 0.3,-0.2,0.1,0,0.5,-0.4 --jobs 1");
    const CliRun b = run_cli("analyze --input WITNESS6 --mu 0.3,-0.2,0.1,0,0.5,-0.4 --jobs 4");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);

    const CliRun s1 = run_cli("search --mode local --arity 5 --seed 9 --jobs 1");
    const CliRun s2 = run_cli("search --mode local --arity 5 --seed 9 --jobs 3");
    REQUIRE(s1.exit_code == 0);
    CHECK(s1.out == s2.out);
}

TEST_CASE("--out writes the same bytes as stdout") {
    const auto path =
        std::filesystem::temp_directory_path() / "feilab_out_file.json";
    const CliRun direct = run_cli("spectrum --input MAJ3");
    const CliRun filed = run_cli("spectrum --input MAJ3 --out " + path.string());
    REQUIRE(direct.exit_code == 0);
    REQUIRE(filed.exit_code == 0);
    CHECK(filed.out.empty());
    CHECK(slurp(path) == direct.out);
    std::filesystem::remove(path);
}

TEST_CASE("amplify emits the level table") {
    const CliRun r = run_cli("amplify --F WITNESS6 --m 3");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# tool=feilab", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "m,entropy,influence,ratio");
    std::getline(lines, line);
    CHECK(line.rfind("0,", 0) == 0);
    // Last row is the limit.
    std::string last;
    while (std::getline(lines, line))
        if (!line.empty()) last = line;
    CHECK(last.rfind("limit,,,6.27894525", 0) == 0);

    // Unbalanced base functions cannot amplify.
    CHECK(run_cli("amplify --F AND2 --m 2").exit_code == 1);
}

TEST_CASE("compose runs a spec file end to end") {
    nlohmann::json spec;
    spec["outer"] = nlohmann::json::parse(write_table_json(make_xor(2)));
    spec["inner"] = {nlohmann::json::parse(write_table_json(make_xor(2))),
                     nlohmann::json::parse(write_table_json(make_xor(2)))};
    spec["mu"] = "uniform";
    const auto path = write_temp("feilab_spec.json", spec.dump());
    const CliRun r = run_cli("compose --input " + path.string());
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["n"] == 4);
    CHECK(j["hex"] == make_xor(4).to_hex());
    CHECK(j["closed_form"]["influence"] == doctest::Approx(4.0));
    CHECK(!j["identities"].is_null());
    std::filesystem::remove(path);
}

TEST_CASE("verify returns exit 2 on a forced violation") {
    const CliRun ok = run_cli(
        "verify --grid -0.4,0,0.4 --grid-arity 2 --uniform-arity 3 --samples 300 "
        "--random-arity 4 --seed 3");
    REQUIRE(ok.exit_code == 0);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["clean"] == true);
    CHECK(j["violations"].empty());
    CHECK(j["max_term_ratio"].get<double>() <= 1.0);

    // An absurd negative slack turns every checked inequality into a
    // violation; the tool must report and exit 2.
    const CliRun bad = run_cli(
        "verify --grid 0 --grid-arity 1 --uniform-arity 0 --samples 0 "
        "--slack=-1000000000");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("violation") != std::string::npos);
    const auto jb = nlohmann::json::parse(bad.out);
    CHECK(jb["clean"] == false);
}

TEST_CASE("search subcommand output shape") {
    const CliRun r = run_cli("search --mode exhaustive --arity 3 --constraint balanced");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["scanned"] == 70);
    CHECK(j["best"]["ratio"].is_number());
    CHECK(!j["histogram"].empty());

    const CliRun w = run_cli("search --mode worst-case --arity 2 --grid uniform");
    REQUIRE(w.exit_code == 0);
    const auto jw = nlohmann::json::parse(w.out);
    CHECK(jw["observed"].get<double>() == doctest::Approx(6.0));
    CHECK(jw["within_bound"] == true);
}

}
