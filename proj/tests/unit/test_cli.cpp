#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path scratch = QMOD_TEST_SCRATCH;

int run(const std::string & args, const std::string & stdout_file = "")
{
    fs::create_directories(scratch);
    const std::string redirect = stdout_file.empty() ? (scratch / "stdout.txt").string() : stdout_file;
    const std::string cmd =
        std::string("\"") + QMOD_CLI_PATH + "\" " + args + " >\"" + redirect + "\" 2>\"" + (scratch / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path & p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_file(const std::string & name, const std::string & text)
{
    fs::create_directories(scratch);
    const auto path = scratch / name;
    std::ofstream(path) << text;
    return path.string();
}

double value_after(const std::string & text, const std::string & key)
{
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size()));
}

std::string without_first_line(const std::string & s) { return s.substr(s.find('\n') + 1); }

} // namespace

TEST_CASE("modulus of builtin shapes")
{
    CHECK(run("modulus square --budget 2000") == 0);
    const auto out = slurp(scratch / "stdout.txt");
    CHECK(std::abs(value_after(out, "modulus") - 1.0) <= 1e-6);
    CHECK(out.find("dofs") != std::string::npos);
    CHECK(out.find("reciprocal_defect") != std::string::npos);

    CHECK(run("modulus trapezoid:h=1.5 --budget 20000") == 0);
    CHECK(std::abs(value_after(slurp(scratch / "stdout.txt"), "modulus") - 0.7769434) <= 1e-4);

    CHECK(run("modulus rectangle:h=2 --budget 2000") == 0);
    CHECK(std::abs(value_after(slurp(scratch / "stdout.txt"), "modulus") - 2.0) <= 1e-5);
}

TEST_CASE("modulus of a polygon file with CSV and mesh output")
{
    const auto poly = write_file("square.txt", "# unit square\n4 0 1 2 3\n1 1\n0 1\n0 0\n1 0\n");
    const auto csv = (scratch / "square.csv").string();
    const auto mesh = (scratch / "square.mesh").string();
    CHECK(run("modulus " + poly + " --budget 500 --tol 1e-11 --out " + csv + " --mesh-out " + mesh) == 0);
    const auto text = slurp(csv);
    CHECK(text.rfind("# command=modulus", 0) == 0);
    CHECK(without_first_line(text).rfind("modulus,dofs,", 0) == 0);
    CHECK(fs::file_size(mesh) > 0);

    CHECK(run("modulus circular:theta=0.5,r=0.4 --arc-segments 4 --budget 500") == 0);
}

TEST_CASE("input errors exit with 2")
{
    const auto bad = write_file("bad.txt", "4 0 1 2\n1 1\n0 1\n0 0\n1 0\n");
    CHECK(run("modulus " + bad) == 2);
    const auto crossed = write_file("crossed.txt", "4 0 1 2 3\n1 1\n0 0\n0 1\n1 0\n");
    CHECK(run("modulus " + crossed) == 2);
    CHECK(run("modulus /nonexistent/file.txt") == 2);
    CHECK(run("modulus trapezoid:h=0.5") == 2);
    CHECK(run("modulus trapezoid") == 2);
    CHECK(run("modulus hexagon:h=1") == 2);
    CHECK(run("modulus square --budget -3") == 2);
    CHECK(run("modulus square --tol zero") == 2);
    CHECK(run("recip-grid --grid 5by5") == 2);
    CHECK(run("recip-grid --grid 1x1 --x-range 0.5:4") == 2);
    CHECK(run("mu-plot --a 0.7") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("") == 2);
}

TEST_CASE("numerical failure exits with 3")
{
    // A residual tolerance below machine precision cannot be met.
    CHECK(run("modulus trapezoid:h=1.5 --budget 2000 --tol 1e-30") == 3);
}

TEST_CASE("recip-grid CSV and SVG")
{
    const auto csv = (scratch / "recip.csv").string();
    const auto svg = (scratch / "recip.svg").string();
    CHECK(run("recip-grid --grid 2x2 --budget 300 --out " + csv + " --svg " + svg) == 0);
    const auto text = slurp(csv);
    CHECK(without_first_line(text).rfind("x,y,f,log10_abs_f", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 2 + 4);
    CHECK(slurp(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("commands are deterministic")
{
    const auto a = (scratch / "a.csv").string();
    const auto b = (scratch / "b.csv").string();
    CHECK(run("trapezoid-table --heights 1.2,1.7 --budget 1000 --threads 2 --out " + a) == 0);
    CHECK(run("trapezoid-table --heights 1.2,1.7 --budget 1000 --threads 1 --out " + b) == 0);
    CHECK(without_first_line(slurp(a)) == without_first_line(slurp(b)));
}

TEST_CASE("table commands")
{
    const auto out = (scratch / "t.csv").string();
    CHECK(run("parallelogram --grid 2x3 --budget 500 --out " + out + " --svg " + (scratch / "p.svg").string()) == 0);
    CHECK(without_first_line(slurp(out)).rfind("t,h,g_exact,g_fem,log10_error", 0) == 0);
    CHECK(run("parallelogram --grid 2x3 --heights 1,1.5 --budget 500 --out " + out) == 0);
    CHECK(run("circular-table --theta 0.3,0.9 --arc-segments 8 --budget 800 --out " + out) == 0);
    CHECK(without_first_line(slurp(out)).rfind("theta,fem,exact,error", 0) == 0);
    CHECK(run("mu-plot --a 0.25,0.5 --r-steps 9 --out " + out) == 0);
    CHECK(without_first_line(slurp(out)).rfind("a,r,mu,product", 0) == 0);
    CHECK(run("trapezoid-table --heights 1.1 --budget 300") == 0);
    CHECK(slurp(scratch / "stdout.txt").find("h,fem,bowman,error,reciprocal_defect") != std::string::npos);
}
