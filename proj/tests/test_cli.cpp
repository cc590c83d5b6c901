// Drives the installed binary end to end: exit codes, CSV schemas, the
// resolved-config header line, file outputs, and run-to-run determinism.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("gmdde_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture =
      work_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(GMDDE_CLI_PATH) + " " + args + " > " +
                          capture.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  std::ifstream is(capture);
  std::stringstream ss;
  ss << is.rdbuf();
  r.out = ss.str();
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

json header_of(const std::string& text) {
  const std::vector<std::string> ls = lines_of(text);
  REQUIRE(!ls.empty());
  REQUIRE(ls[0].rfind("# ", 0) == 0);
  return json::parse(ls[0].substr(2));
}

std::vector<double> row_of(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    vals.push_back(std::strtod(cell.c_str(), nullptr));
  }
  return vals;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes follow the contract") {
    CHECK(run_cli("equilibria --preset set1").code == 0);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("equilibria --preset nope").code == 2);
    CHECK(run_cli("equilibria --bogus-flag").code == 2);
    CHECK(run_cli("lindstedt --preset set1").code == 2);  // --eps is required
    CHECK(run_cli("").code == 2);                         // subcommand required
    const fs::path out = work_dir() / "codes";
    CHECK(run_cli("correct --preset set1 --mesh-M 4 --out " + out.string())
              .code == 2);
    // An amplitude far outside the expansion's disk drives the truncated
    // frequency negative, a numerical failure rather than a config error.
    CHECK(run_cli("correct --preset set1 --eps 0.5 --out " + out.string())
              .code == 3);
  }

  TEST_CASE("equilibria reports the ascending root list") {
    const RunResult r = run_cli("equilibria --preset set1");
    REQUIRE(r.code == 0);
    const json cfg = header_of(r.out);
    CHECK(cfg.at("preset") == "set1");
    CHECK(cfg.at("eq_index") == 2);
    CHECK(cfg.at("cmd") == "equilibria");
    const std::vector<std::string> ls = lines_of(r.out);
    REQUIRE(ls.size() == 5);  // header, columns, three roots
    CHECK(ls[1] == "index,u0,v0");
    const double u0[] = {1.0, 2.0, 3.0};
    const double v0[] = {12.0, 15.0, 20.0};
    for (int i = 0; i < 3; ++i) {
      const std::vector<double> row = row_of(ls[static_cast<size_t>(2 + i)]);
      REQUIRE(row.size() == 3);
      CHECK(row[0] == i);
      CHECK(row[1] == doctest::Approx(u0[i]).epsilon(1e-12));
      CHECK(row[2] == doctest::Approx(v0[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("hopf reports the certified crossings") {
    const RunResult r1 = run_cli("hopf --preset set1 --s0 1.5");
    REQUIRE(r1.code == 0);
    std::vector<std::string> ls = lines_of(r1.out);
    REQUIRE(ls.size() >= 3);
    CHECK(ls[1] == "s0,j,gamma0,omega0,transversality");
    std::vector<double> row = row_of(ls[2]);
    REQUIRE(row.size() == 5);
    CHECK(row[0] == 1.5);
    CHECK(row[1] == 0);
    CHECK(row[2] == doctest::Approx(2.710291053576803).epsilon(1e-9));
    CHECK(row[3] == doctest::Approx(0.182450540).epsilon(1e-7));
    CHECK(row[4] > 0.0);

    const RunResult r2 = run_cli("hopf --preset set2");
    REQUIRE(r2.code == 0);
    ls = lines_of(r2.out);
    REQUIRE(ls.size() >= 3);
    row = row_of(ls[2]);
    CHECK(row[2] == doctest::Approx(0.04006642728377628).epsilon(1e-9));
  }

  TEST_CASE("lindstedt prints one row per order") {
    const RunResult r =
        run_cli("lindstedt --preset set1 --order 4 --eps 0.05");
    REQUIRE(r.code == 0);
    const std::vector<std::string> ls = lines_of(r.out);
    REQUIRE(ls.size() == 7);  // header, columns, k = 0..4
    CHECK(ls[1] == "k,gamma_k,omega_k,sup_y_k,eps_pow_k_sup");
    std::vector<std::vector<double>> rows;
    for (size_t i = 2; i < ls.size(); ++i) rows.push_back(row_of(ls[i]));
    for (int k = 0; k <= 4; ++k) CHECK(rows[static_cast<size_t>(k)][0] == k);
    CHECK(rows[0][1] == doctest::Approx(2.710291053576803).epsilon(1e-9));
    CHECK(rows[0][2] == doctest::Approx(0.182450540).epsilon(1e-7));
    CHECK(rows[1][1] == 0.0);  // no quadratic-order detuning
    CHECK(rows[2][1] == doctest::Approx(7.27931).epsilon(1e-4));
    CHECK(rows[1][3] > 0.0);
    // The scaled tail eps^k sup|y_k| shrinks once the series takes over.
    for (int k = 2; k <= 4; ++k) {
      CHECK(rows[static_cast<size_t>(k)][4] <
            rows[static_cast<size_t>(k - 1)][4]);
    }
    CHECK(header_of(r.out).at("eps") == 0.05);
  }

  TEST_CASE("correct writes a matching orbit file") {
    const fs::path out = work_dir() / "correct";
    const RunResult r =
        run_cli("correct --preset set1 --out " + out.string());
    REQUIRE(r.code == 0);
    const std::vector<std::string> ls = lines_of(r.out);
    REQUIRE(ls.size() == 3);
    CHECK(ls[1] == "gamma,T,iterations,residual,initial_residual,distance");
    const std::vector<double> row = row_of(ls[2]);
    REQUIRE(row.size() == 6);
    CHECK(row[0] > 2.710291);  // supercritical: gamma moves past the crossing
    CHECK(row[2] <= 10);
    CHECK(row[3] < 1e-10);
    CHECK(row[4] > row[3]);
    CHECK(row[5] < 0.01);  // guess-to-orbit distance at the auto amplitude

    const json orbit = json::parse(slurp(out / "orbit_set1_s0_1.5_j0.json"));
    CHECK(orbit.at("samples").size() == 256);
    CHECK(orbit.at("config").at("cmd") == "correct");
    CHECK(orbit.at("config").at("eps").get<double>() > 0.0);  // auto-resolved
    CHECK(orbit.at("gamma").get<double>() ==
          doctest::Approx(row[0]).epsilon(1e-14));
    CHECK(orbit.at("T").get<double>() == doctest::Approx(row[1]).epsilon(1e-14));
  }

  TEST_CASE("continue fans out one branch file per crossing") {
    const fs::path out = work_dir() / "fanout";
    const std::string cmd = "continue --preset set1 --s0 10 --max-steps 5 "
                            "--jobs 2 --out " +
                            out.string();
    const RunResult r = run_cli(cmd);
    REQUIRE(r.code == 0);
    const std::vector<std::string> ls = lines_of(r.out);
    REQUIRE(ls.size() == 6);  // header, columns, four branches
    CHECK(ls[1] ==
          "j,gamma0,points,termination,gamma_end,T_end,l2_end,arclength_end");
    const double gamma0[] = {0.615975239449273, 9.101094697114176,
                             17.58621415477908, 26.071333612444096};
    for (int j = 0; j < 4; ++j) {
      const std::vector<double> row = row_of(ls[static_cast<size_t>(2 + j)]);
      CHECK(row[0] == j);
      CHECK(row[1] == doctest::Approx(gamma0[j]).epsilon(1e-9));
      CHECK(row[2] == 6);  // start point plus max_steps accepted steps
      CHECK(row[4] > row[1]);
    }

    std::vector<std::string> first_pass;
    for (int j = 0; j < 4; ++j) {
      const fs::path file =
          out / ("branch_set1_s0_10_j" + std::to_string(j) + ".csv");
      REQUIRE(fs::exists(file));
      const std::string body = slurp(file);
      first_pass.push_back(body);
      const std::vector<std::string> bl = lines_of(body);
      REQUIRE(bl.size() == 8);  // header, columns, six points
      CHECK(bl[1] == "gamma,T,l2,sup,arclength");
      CHECK(header_of(body).at("hopf_index") == j);
      double prev_arc = -1.0;
      for (size_t i = 2; i < bl.size(); ++i) {
        const std::vector<double> row = row_of(bl[i]);
        REQUIRE(row.size() == 5);
        CHECK(row[4] > prev_arc);
        prev_arc = row[4];
      }
    }

    // Identical invocation, byte-identical outputs.
    const RunResult r2 = run_cli(cmd);
    REQUIRE(r2.code == 0);
    CHECK(r2.out == r.out);
    for (int j = 0; j < 4; ++j) {
      CHECK(slurp(out / ("branch_set1_s0_10_j" + std::to_string(j) +
                         ".csv")) == first_pass[static_cast<size_t>(j)]);
    }

    const fs::path one = work_dir() / "single";
    const RunResult r3 =
        run_cli("continue --preset set1 --s0 10 --max-steps 3 --hopf-index 2 "
                "--out " +
                one.string());
    REQUIRE(r3.code == 0);
    CHECK(fs::exists(one / "branch_set1_s0_10_j2.csv"));
    CHECK(!fs::exists(one / "branch_set1_s0_10_j0.csv"));
    CHECK(lines_of(r3.out).size() == 3);
  }

  TEST_CASE("continue writes requested orbit snapshots") {
    const fs::path out = work_dir() / "snaps";
    const RunResult r =
        run_cli("continue --preset set1 --max-steps 4 --snapshot-every 2 "
                "--out " +
                out.string());
    REQUIRE(r.code == 0);
    for (int i : {0, 2, 4}) {
      const fs::path snap =
          out / ("branch_set1_s0_1.5_j0_pt" + std::to_string(i) + ".json");
      REQUIRE(fs::exists(snap));
      const json orbit = json::parse(slurp(snap));
      CHECK(orbit.at("config").at("cmd") == "continue");
      CHECK(orbit.at("T").get<double>() > 30.0);
    }
    CHECK(!fs::exists(out / "branch_set1_s0_1.5_j0_pt1.json"));
  }

  TEST_CASE("validate reports a small return-map error") {
    const RunResult r = run_cli("validate --preset set1");
    REQUIRE(r.code == 0);
    const std::vector<std::string> ls = lines_of(r.out);
    REQUIRE(ls.size() == 3);
    CHECK(ls[1] == "j,gamma,T,return_map_error,h");
    const std::vector<double> row = row_of(ls[2]);
    REQUIRE(row.size() == 5);
    CHECK(row[3] < 1e-6);
    CHECK(row[4] == doctest::Approx(row[2] / 2048.0).epsilon(1e-12));
  }

  TEST_CASE("config file merges below flags") {
    const fs::path cfg = work_dir() / "cfg.json";
    std::ofstream(cfg) << "{\"s0\": 2.0, \"mesh\": {\"M\": 32}}";
    const RunResult file_only =
        run_cli("hopf --preset set1 --config " + cfg.string());
    REQUIRE(file_only.code == 0);
    CHECK(header_of(file_only.out).at("s0") == 2.0);
    CHECK(header_of(file_only.out).at("mesh").at("M") == 32);
    CHECK(row_of(lines_of(file_only.out)[2])[2] ==
          doctest::Approx(2.2585758779806677).epsilon(1e-9));

    const RunResult flag_wins =
        run_cli("hopf --preset set1 --config " + cfg.string() + " --s0 1.5");
    REQUIRE(flag_wins.code == 0);
    CHECK(header_of(flag_wins.out).at("s0") == 1.5);
    CHECK(row_of(lines_of(flag_wins.out)[2])[2] ==
          doctest::Approx(2.710291053576803).epsilon(1e-9));

    const fs::path bad = work_dir() / "bad.json";
    std::ofstream(bad) << "{\"no_such_key\": 1}";
    CHECK(run_cli("hopf --config " + bad.string()).code == 2);
    const fs::path mal = work_dir() / "mal.json";
    std::ofstream(mal) << "{oops";
    CHECK(run_cli("hopf --config " + mal.string()).code == 2);
  }
}
