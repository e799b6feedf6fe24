#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "crndist/cli.hpp"
#include "crndist/crn.hpp"
#include "crndist/pmf.hpp"
#include "support.hpp"

using namespace crndist;
using namespace crndist::testing;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("crndist-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    std::string at(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return CliResult{code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("eval writes exact pmfs") {
    TempDir dir;
    std::string bern = dir.file("bern.dcal", "(one)_[1/3]:(zero)\n");
    CliResult r = cli({"eval", bern});
    CHECK(r.code == 0);
    CHECK(r.out == "0 : 2/3\n1 : 1/3\n");

    std::string one = dir.file("one.dcal", "one\n");
    CHECK(cli({"eval", one}).out == "1 : 1/1\n");

    std::string p1 = dir.file(
        "p1.dcal", "(one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)\n");
    CliResult with_env = cli({"eval", p1, "--env", "c=1/2"});
    CHECK(with_env.code == 0);
    CHECK(parse_pmf(with_env.out) == make_pmf({{3, Rat(401, 5000)},
                                               {4, Rat(1203, 10000)},
                                               {6, Rat(1599, 5000)},
                                               {7, Rat(4797, 10000)}}));

    CHECK(cli({"eval", p1}).code == 2); // unbound variable
    CHECK(cli({"eval", dir.file("bad.dcal", "(one\n")}).code == 2);
    CHECK(cli({"eval", dir.at("missing.dcal")}).code == 2);
}

TEST_CASE("compile emits reparsable CRN files") {
    TempDir dir;
    std::string pmf_path = dir.file("ex1.pmf", "2 : 1/6\n5 : 1/3\n10 : 1/2\n");
    std::string crn_path = dir.at("ex1.crn");
    CliResult r = cli({"compile", pmf_path, "--direct", "--out", crn_path});
    REQUIRE(r.code == 0);
    Crs crs = parse_crn(slurp(crn_path));
    CHECK(crs.reactions().size() == 6);
    CHECK(parse_crn(crn_to_text(crs)) == crs);

    CliResult steady = cli({"steady", crn_path});
    CHECK(steady.code == 0);
    CHECK(steady.out.find("method exact-rational-absorption") != std::string::npos);
    CHECK(steady.out.find("2 : 1/6") != std::string::npos);
    CHECK(steady.out.find("5 : 1/3") != std::string::npos);
    CHECK(steady.out.find("10 : 1/2") != std::string::npos);

    // Translation of the trivial formula: no reactions, one output molecule.
    CliResult one = cli({"compile", dir.file("one.dcal", "one\n")});
    CHECK(one.code == 0);
    CHECK(one.out.find("init Out = 1") != std::string::npos);
    CHECK(one.out.find("rxn") == std::string::npos);

    CliResult rate_free = cli({"compile", pmf_path, "--rate-free"});
    CHECK(rate_free.code == 0);
    Crs rate_free_crs = parse_crn(rate_free.out);
    for (const auto& r2 : rate_free_crs.reactions()) CHECK(r2.rate == Rat(1));
}

TEST_CASE("compile routes multidimensional pmfs to the joint construction") {
    TempDir dir;
    std::string joint = dir.file("joint.pmf", "3,1 : 1/6\n3,2 : 1/3\n1,5 : 1/2\n");
    CliResult r = cli({"compile", joint});
    REQUIRE(r.code == 0);
    Crs crs = parse_crn(r.out);
    CHECK(crs.reactions().size() == 9);
    CHECK(crs.outputs().size() == 2);

    std::string crn_path = dir.at("joint.crn");
    REQUIRE(cli({"compile", joint, "--out", crn_path}).code == 0);
    CliResult steady = cli({"steady", crn_path});
    CHECK(steady.code == 0);
    CHECK(steady.out.find("marginal Out1") != std::string::npos);
    CHECK(steady.out.find("marginal Out2") != std::string::npos);

    CHECK(cli({"compile", joint, "--rate-free"}).code == 2);
}

TEST_CASE("compile truncates infinite tails behind --epsilon") {
    TempDir dir;
    CliResult r = cli({"compile", "geometric:1/2", "--epsilon", "1/1024"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("massLost: 1/2048") != std::string::npos);
    Crs crs = parse_crn(r.out);
    CHECK(crs.has_species("Sink"));

    CHECK(cli({"compile", "geometric:1/2"}).code == 2); // epsilon required
}

TEST_CASE("steady reports resource exhaustion as exit 3") {
    TempDir dir;
    std::string poisson = dir.file("poisson.crn",
                                   "species P\n"
                                   "rxn 0 -> P @ 5\n"
                                   "rxn P -> 0 @ 1\n"
                                   "output P\n");
    CliResult r = cli({"steady", poisson, "--cap", "100"});
    CHECK(r.code == 3);
    CHECK(r.err.find("cap") != std::string::npos);
}

TEST_CASE("steady emits machine-readable reports") {
    TempDir dir;
    std::string crn = dir.file("uniform.crn",
                               "species U1, U2\n"
                               "init U1 = 3\n"
                               "rxn U1 -> U2 @ 1\n"
                               "rxn U2 -> U1 @ 1\n"
                               "rxn U1 + U2 -> 2 U1 @ 1\n"
                               "rxn U1 + U2 -> 2 U2 @ 1\n"
                               "output U1\n");
    std::string json_path = dir.at("report.json");
    CliResult r = cli({"steady", crn, "--json", json_path});
    REQUIRE(r.code == 0);
    auto parsed = nlohmann::json::parse(slurp(json_path));
    CHECK(parsed["states"] == 4);
    CHECK(parsed["method"] == "exact-rational-stationary");
    CHECK(parsed["marginals"]["U1"].size() == 4);
    CHECK(parsed["marginals"]["U1"][0]["prob"] == "1/4");
}

TEST_CASE("simulate is byte-deterministic for a fixed seed") {
    TempDir dir;
    std::string pmf_path = dir.file("ex1.pmf", "2 : 1/6\n5 : 1/3\n10 : 1/2\n");
    std::string crn_path = dir.at("ex1.crn");
    REQUIRE(cli({"compile", pmf_path, "--out", crn_path}).code == 0);

    CliResult a = cli({"simulate", crn_path, "--trials", "400", "--seed", "42"});
    CliResult b = cli({"simulate", crn_path, "--trials", "400", "--seed", "42"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("histogram Out") != std::string::npos);

    CliResult threaded = cli({"simulate", crn_path, "--trials", "400", "--seed", "42",
                              "--threads", "3"});
    CHECK(threaded.out == a.out);

    CliResult single = cli({"simulate", crn_path, "--trials", "1", "--seed", "7"});
    CHECK(single.code == 0);

    std::string json_path = dir.at("sim.json");
    CHECK(cli({"simulate", crn_path, "--trials", "10", "--seed", "1", "--json",
               json_path}).code == 0);
    auto parsed = nlohmann::json::parse(slurp(json_path));
    CHECK(parsed["trials"] == 10);
}

TEST_CASE("simulate occupation mode") {
    TempDir dir;
    std::string poisson = dir.file("poisson.crn",
                                   "species P\n"
                                   "rxn 0 -> P @ 1\n"
                                   "rxn P -> 0 @ 1\n"
                                   "output P\n");
    CliResult r = cli({"simulate", poisson, "--occupation", "--min-events", "5000",
                       "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("occupation P") != std::string::npos);
}

TEST_CASE("verify gates on the tolerance") {
    TempDir dir;
    std::string bern = dir.file("bern.dcal", "(one)_[1/3]:(zero)\n");
    CliResult exact = cli({"verify", bern, "--tol", "0"});
    CHECK(exact.code == 0);
    CHECK(exact.out.find("l1 0/1") != std::string::npos);
    CHECK(exact.out.find("ratio 1/1") != std::string::npos);
    CHECK(exact.out.find("verdict PASS") != std::string::npos);

    // A variable-weight choice at low rate separation keeps a real error, so
    // tolerance zero must fail: the negative control.
    std::string ext = dir.file("ext.dcal", "(one)_[1/2*c]:(zero)\n");
    CliResult control = cli({"verify", ext, "--env", "c=1/2", "--tol", "0",
                             "--rho", "100"});
    CHECK(control.code == 1);
    CHECK(control.out.find("verdict FAIL") != std::string::npos);

    CliResult loose = cli({"verify", ext, "--env", "c=1/2", "--tol", "1/10",
                           "--rho", "1000000"});
    CHECK(loose.code == 0);

    CHECK(cli({"verify", dir.at("nothing.dcal")}).code == 2);
}
