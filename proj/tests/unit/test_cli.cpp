#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tfred/cli.hpp"
#include "test_systems.hpp"

using namespace tfred;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args, const Registry& reg = testing::test_registry()) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err, reg);
    return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tfred_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("list") {
    CHECK(lines(run({"list"}, Registry::builtin()).out) == 6);
    CHECK(lines(run({"list"}).out) == 10);
    const Run empty = run({"list"}, Registry{});
    CHECK(empty.code == kExitOk);
    CHECK(lines(empty.out) == 1);
}

TEST_CASE("usage errors") {
    CHECK(run({"check", "--system", "nope"}).code == kExitUsage);
    CHECK(run({"check", "--system", "nope"}).err.find("mm_irrev_slow_k2") != std::string::npos);
    CHECK(run({"check", "--bogus"}).code == kExitUsage);
    CHECK(run({"check"}).code == kExitUsage);
    CHECK(run({"converge", "--system", "linear_toy", "--eps", "1e-2,1e-1"}).code == kExitUsage);
    CHECK(run({"check", "--system", "mm_irrev_slow_k2", "--set", "k9=1"}).code == kExitUsage);
}

TEST_CASE("check verdicts") {
    CHECK(run({"check", "--system", "mm_irrev_slow_k2"}).code == kExitOk);
    CHECK(run({"check", "--system", "linear_toy"}).code == kExitOk);
    const Run j = run({"check", "--system", "jordan_block"});
    CHECK(j.code == kExitFailure);
    const Run s = run({"check", "--system", "mm_shrunken"});
    CHECK(s.code == kExitFailure);
    CHECK(s.out.find("s + c <= 0.8 s0") != std::string::npos);
}

TEST_CASE("converge writes outputs and honours the checks") {
    const fs::path a = scratch("a"), b = scratch("b");
    CHECK(run({"converge", "--system", "linear_toy", "--eps", "1e-1,1e-2", "--T", "5", "--out", a.string()}).code ==
          kExitOk);
    CHECK(run({"converge", "--system", "linear_toy", "--eps", "1e-1,1e-2", "--T", "5", "--out", b.string()}).code ==
          kExitOk);
    CHECK(fs::exists(a / "run.cfg"));
    CHECK(fs::exists(a / "convergence.txt"));
    CHECK(slurp(a / "convergence.csv") == slurp(b / "convergence.csv"));
    CHECK_FALSE(slurp(a / "convergence.csv").empty());

    // replay from the recorded configuration
    const fs::path c = scratch("c");
    CHECK(run({"converge", "--config", (a / "run.cfg").string(), "--out", c.string()}).code == kExitOk);
    CHECK(slurp(a / "convergence.csv") == slurp(c / "convergence.csv"));

    CHECK(run({"converge", "--system", "jordan_block", "--eps", "1e-1"}).code == kExitFailure);
    CHECK(run({"converge", "--system", "vdp_nonexample", "--eps", "1e-1,1e-2", "--T", "30", "--force"}).code ==
          kExitFailure);
}

TEST_CASE("reduce and lyapunov") {
    const Run r = run({"reduce", "--system", "mm_irrev_slow_k2"});
    CHECK(r.code == kExitOk);
    CHECK_FALSE(r.out.empty());
    CHECK(run({"lyapunov", "--system", "comp_inhibition_2d"}).code == kExitOk);
    CHECK(run({"lyapunov", "--system", "maltose_transport"}).code == kExitOk);
}
