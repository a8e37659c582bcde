// Runs the shellgsm executable end to end.
#include <doctest/doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = SHELLGSM_SCENARIO_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("shellgsm_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string out, err;
};

Run shellgsm(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch() / ("stdout" + std::to_string(counter));
  const fs::path err = scratch() / ("stderr" + std::to_string(counter++));
  const std::string cmd = std::string("\"") + SHELLGSM_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return nlohmann::json::parse(in);
}

const std::string kShell = R"([geometry]
rb_mm = 150
ra_mm = 180
[layer]
type = iso
thickness_mm = 30
eps = 5 - 0.5j
[frequency]
start_ghz = 3.2
stop_ghz = 3.8
points = 4
)";

std::string cfg_arg(const fs::path& p) { return "--config \"" + p.string() + "\""; }
std::string out_arg(const std::string& name) { return " --out \"" + (scratch() / name).string() + "\""; }

}  // namespace

TEST_CASE("version and usage") {
  const Run v = shellgsm("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find('.') != std::string::npos);
  CHECK(shellgsm("").code == 2);
  CHECK(shellgsm("sso").code == 2);
  CHECK(shellgsm("sso --config x.ini --threads 0").code == 2);
}

TEST_CASE("config errors exit with 2") {
  CHECK(shellgsm("sso --config /nonexistent.ini").code == 2);

  std::string biaxial = kShell;
  biaxial.replace(biaxial.find("type = iso"), 10, "type = biaxial");
  Run r = shellgsm("sso " + cfg_arg(write_config("biaxial.ini", biaxial)) + out_arg("biaxial"));
  CHECK(r.code == 2);
  CHECK(r.err.find("line 5, column 8") != std::string::npos);
  CHECK(r.err.find("isotropic or uniaxially anisotropic") != std::string::npos);

  std::string backwards = kShell;
  backwards.replace(backwards.find("stop_ghz = 3.8"), 14, "stop_ghz = 3.0");
  r = shellgsm("sso " + cfg_arg(write_config("backwards.ini", backwards)) + out_arg("backwards"));
  CHECK(r.code == 2);
  CHECK(r.err.find("stop_ghz") != std::string::npos);

  r = shellgsm("sso " + cfg_arg(write_config("typo.ini", kShell + "[antenna]\nsorce = null\n")) + out_arg("typo"));
  CHECK(r.code == 2);
  CHECK(r.err.find("line 13, column 1") != std::string::npos);

  // layers that stop short of ra
  std::string gap = kShell;
  gap.replace(gap.find("thickness_mm = 30"), 17, "thickness_mm = 20");
  CHECK(shellgsm("sso " + cfg_arg(write_config("gap.ini", gap)) + out_arg("gap")).code == 2);

  // file antenna whose frequency grid does not cover the scenario
  const fs::path dipole = kScenarios / "dipole_gsm.json";
  std::string off = kShell;
  off.replace(off.find("start_ghz = 3.2"), 15, "start_ghz = 3.25");
  r = shellgsm("sparams " + cfg_arg(write_config("off.ini", off + "[antenna]\nsource = file\ngsm_file = \"" +
                                                                dipole.string() + "\"\n")) +
               out_arg("off"));
  CHECK(r.code == 2);
  r = shellgsm("sparams " + cfg_arg(write_config("lmax.ini", kShell + "[antenna]\nsource = file\ngsm_file = \"" +
                                                                  dipole.string() + "\"\n")) +
               out_arg("lmax") + " --lmax-override 5");
  CHECK(r.code == 2);
}

TEST_CASE("resonance-degenerate input exits with 3") {
  // psi_1(k0 rb) = 0 at 1 GHz
  const double rb_mm = 4.4934094579090641753 / (2 * 3.14159265358979323846 * 1e9 / 299792458.0) * 1e3;
  char text[512];
  std::snprintf(text, sizeof text,
                "[geometry]\nrb_mm = %.17g\nra_mm = 250\n[layer]\ntype = iso\nr_outer_mm = 250\neps = 2\n"
                "[frequency]\nstart_ghz = 1\nstop_ghz = 1\npoints = 1\n",
                rb_mm);
  const Run r = shellgsm("sso " + cfg_arg(write_config("degenerate.ini", text)) + out_arg("degenerate"));
  CHECK(r.code == 3);
  CHECK(r.err.find("degenerate") != std::string::npos);
}

TEST_CASE("validation failures exit with 4") {
  const Run ok = shellgsm("validate " + cfg_arg(kScenarios / "iso_shell.ini") + out_arg("val_ok") + " --threads 2");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("[FAIL]") == std::string::npos);
  const auto rows = read_csv(scratch() / "val_ok" / "validate.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0][0] == "freq_hz");

  // Phi = Psi on a continuous profile is held to 1e-10 absolute; the ODE
  // tolerance alone leaves it near 1e-7, so this run is expected to fail.
  const Run bad = shellgsm("run " + cfg_arg(kScenarios / "profile_shell.ini") + out_arg("val_bad"));
  CHECK(bad.code == 4);
  CHECK(bad.out.find("[FAIL] phi = psi") != std::string::npos);
  const auto stair = read_csv(scratch() / "val_bad" / "staircase.csv");
  REQUIRE(stair.size() == 5);
  for (std::size_t i = 2; i < stair.size(); ++i)
    CHECK(std::stod(stair[i][1]) < std::stod(stair[i - 1][1]));
  CHECK(manifest(scratch() / "val_bad")["exit_code"] == 4);
}

TEST_CASE("sso output") {
  const Run r = shellgsm("sso " + cfg_arg(kScenarios / "two_layer.ini") + out_arg("sso"));
  REQUIRE(r.code == 0);
  const auto rows = read_csv(scratch() / "sso" / "sso.csv");
  const auto m = manifest(scratch() / "sso");
  const int lmax = m["lmax"];
  CHECK(lmax == 33);  // x = 13.19 at 3.5 GHz
  CHECK(m["num_modes"] == 2 * lmax * (lmax + 2));
  CHECK(rows.size() == 1 + 2 * std::size_t(lmax));
  CHECK(rows[0].size() == 11);
  // bubble and exterior are both vacuum, so Phi and Psi agree
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dre = std::stod(rows[i][5]) - std::stod(rows[i][9]);
    const double dim = std::stod(rows[i][6]) - std::stod(rows[i][10]);
    CHECK(std::hypot(dre, dim) < 1e-8 * std::max(1.0, std::hypot(std::stod(rows[i][5]), std::stod(rows[i][6]))));
  }
}

TEST_CASE("results do not depend on the thread count") {
  REQUIRE(shellgsm("sparams " + cfg_arg(kScenarios / "iso_shell.ini") + out_arg("t1") + " --threads 1").code == 0);
  REQUIRE(shellgsm("sparams " + cfg_arg(kScenarios / "iso_shell.ini") + out_arg("t4") + " --threads 4").code == 0);
  const auto a = read_csv(scratch() / "t1" / "sparams.csv");
  const auto b = read_csv(scratch() / "t4" / "sparams.csv");
  CHECK(a.size() == 8);
  CHECK(a == b);
  CHECK(manifest(scratch() / "t4")["threads"] == 4);
}

TEST_CASE("pattern of a matched dipole in a lossless shell") {
  const Run r = shellgsm("pattern " + cfg_arg(kScenarios / "pattern_shell.ini") + out_arg("pattern"));
  REQUIRE(r.code == 0);
  const auto sp = read_csv(scratch() / "pattern" / "sparams.csv");
  REQUIRE(sp.size() == 2);
  const double gamma2 = std::pow(10.0, std::stod(sp[1][3]) / 10.0);
  double peak = 0.0, peak_theta = -1.0;
  for (const auto& row : read_csv(scratch() / "pattern" / "pattern.csv"))
    if (row.size() == 6 && row[3] == "gain" && std::stod(row[4]) > peak) {
      peak = std::stod(row[4]);
      peak_theta = std::stod(row[1]);
    }
  // power not reflected at the port is radiated
  CHECK(peak == doctest::Approx(1.5 * (1.0 - gamma2)).epsilon(1e-9));
  CHECK(peak_theta == 90.0);
}

TEST_CASE("rcs and compose outputs") {
  REQUIRE(shellgsm("run " + cfg_arg(kScenarios / "uniaxial_shell.ini") + out_arg("rcs")).code == 0);
  const auto rows = read_csv(scratch() / "rcs" / "rcs.csv");
  REQUIRE(rows.size() > 1);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i].back()) == std::stod(rows[i].back()));

  REQUIRE(shellgsm("compose " + cfg_arg(kScenarios / "iso_shell.ini") + out_arg("compose")).code == 0);
  CHECK(fs::exists(scratch() / "compose" / "effective_gsm.json"));
  const auto m = manifest(scratch() / "compose");
  CHECK(m["frequencies_hz"].size() == 7);
  CHECK(m["outputs"].size() == 2);
}

TEST_CASE("sweep loads the antenna once") {
  const fs::path dipole = kScenarios / "dipole_gsm.json";
  const std::string text = R"([geometry]
rb_mm = 150
ra_mm = 180
[layer]
type = iso
thickness_mm = 30
eps = 4
[frequency]
start_ghz = 3.2
stop_ghz = 3.8
points = 7
[antenna]
source = file
gsm_file = ")" + dipole.string() + R"("
[task]
type = sweep
sweep_layer = 1
sweep_parameter = eps
sweep_start = 2
sweep_stop = 8
sweep_points = 6
)";
  const Run r = shellgsm("run " + cfg_arg(write_config("sweep.ini", text)) + out_arg("sweep") + " --threads 2");
  REQUIRE(r.code == 0);
  const auto rows = read_csv(scratch() / "sweep" / "sweep.csv");
  CHECK(rows.size() == 1 + 6 * 7);
  CHECK(rows[0][0] == "point");
  CHECK(std::stod(rows[1][1]) == 2.0);
  CHECK(std::stod(rows.back()[1]) == 8.0);
  const auto m = manifest(scratch() / "sweep");
  CHECK(m["gsm_parse_count"] == 1);
  CHECK(m["timings"]["per_point_s"].size() == 6);

  std::string bad_layer = text;
  bad_layer.replace(bad_layer.find("sweep_layer = 1"), 15, "sweep_layer = 2");
  CHECK(shellgsm("run " + cfg_arg(write_config("sweep_bad.ini", bad_layer)) + out_arg("sweep_bad")).code == 2);
}
