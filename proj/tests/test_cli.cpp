#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "psomle/data_io.hpp"
#include "psomle/simstudy.hpp"
#include "psomle/swarm.hpp"

using namespace psomle;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string output;
};

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "psomle_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cli(const std::string& args) {
  const fs::path log = scratch() / "out.txt";
  const std::string cmd = std::string(PSOMLE_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream text;
  text << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text.str()};
}

bool contains(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(cli("").code != 0);
  CHECK(cli("reproduce --table 9").code == 2);
  const Run model = cli("fit --model nosuch --data builtin:glass_fibers");
  CHECK(model.code == 2);
  CHECK(contains(model.output, "unknown model 'nosuch'"));
  CHECK(cli("fit --model we --data builtin:nosuch").code == 2);
  CHECK(cli("fit --model we").code == 2);
  CHECK(cli("fit --model we --data builtin:glass_fibers --swarm 0").code == 2);
  CHECK(cli("fit --model we --data builtin:glass_fibers --baseline fisher").code == 2);
  CHECK(cli("fit --model bbxii --data builtin:aluminum_coupons --baseline grid").code == 2);
  CHECK(cli("fit --model we --data builtin:glass_fibers --baseline simplex").code == 2);
  CHECK(cli("fit --model we --data builtin:glass_fibers --init-box nosuch=0:1").code == 2);
  CHECK(cli("fit --model logbinom --data builtin:glass_fibers").code == 2);
  CHECK(cli("recast --from " + path("missing.json")).code == 2);
  CHECK(cli("profile --model we --data builtin:glass_fibers --grid alpha=0.01:0.02:3").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("fit, recast and ecdf-fit") {
  const std::string fit_json = path("fit.json");
  const Run fit = cli("fit --model we --data builtin:glass_fibers --swarm 40 --iters 100 --seed 3 "
                      "--baseline nelder-mead --out " + fit_json);
  REQUIRE(fit.code == 0);
  CHECK(contains(fit.output, "objective we on builtin:glass_fibers"));
  CHECK(contains(fit.output, "nelder-mead best of 20"));
  const FitResult saved = load_fit_result(fit_json);
  CHECK(saved.objective == "we");
  CHECK(saved.data_source == "builtin:glass_fibers");
  CHECK(saved.config.swarm_size == 40);
  CHECK(saved.config.seed == 3);
  CHECK(saved.best_params.size() == 3);

  // Same flags, same answer.
  const std::string again_json = path("again.json");
  REQUIRE(cli("fit --model we --data builtin:glass_fibers --swarm 40 --iters 100 --seed 3 --out " +
              again_json).code == 0);
  CHECK(load_fit_result(again_json) == saved);

  const std::string recast_json = path("recast.json");
  const Run recast = cli("recast --from " + fit_json + " --out " + recast_json);
  REQUIRE(recast.code == 0);
  CHECK(contains(recast.output, "change from previous fit"));
  const FitResult next = load_fit_result(recast_json);
  SwarmConfig expected = recast_config(saved, 0.1);
  expected.seed = 1;  // --seed default
  CHECK(next.config == expected);
  CHECK(next.best_fitness >= saved.best_fitness - 1e-3);

  const Run ecdf = cli("ecdf-fit --from " + fit_json);
  CHECK(ecdf.code == 0);
  CHECK(contains(ecdf.output, "KS"));
  const Run direct = cli("ecdf-fit --model we --data builtin:glass_fibers --params 0.0147,2.88,1.02");
  CHECK(direct.code == 0);
  CHECK(cli("ecdf-fit --model we --data builtin:glass_fibers --params 1,2").code == 2);
}

TEST_CASE("regression fits from a CSV") {
  const std::string csv = path("sample.csv");
  {
    std::ofstream out(csv);
    write_csv(Dataset{"s", DataSource::generated, generate_logbinom_sample(SimDesign{}, 1)}, out);
  }
  const Run fit = cli("fit --model logbinom --data " + csv +
                      " --response y --trials trials --no-intercept --init-box x0=-3:0"
                      " --swarm 40 --iters 200 --baseline fisher");
  CHECK(fit.code == 0);
  CHECK(contains(fit.output, "fisher scoring"));
  CHECK(cli("fit --model logbinom --data " + csv + " --response nosuch").code == 2);
}

TEST_CASE("profile writes a grid") {
  const std::string grid_csv = path("grid.csv");
  const Run run = cli("profile --model we --data builtin:glass_fibers --fix lambda=1.158 "
                      "--grid alpha=0.005:0.02:5 --grid beta=2:3:4 --out " + grid_csv);
  REQUIRE(run.code == 0);
  CHECK(contains(run.output, "5 x 4 grid"));
  std::ifstream in(grid_csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 21);

  const std::string grid_json = path("grid.json");
  REQUIRE(cli("profile --model we --data builtin:glass_fibers --fix lambda=1.158 "
              "--grid alpha=0.005:0.02:3 --grid beta=2:3:2 --out " + grid_json).code == 0);
  const PersistedResult r = load_result(grid_json);
  REQUIRE(std::holds_alternative<ProfileGrid>(r));
  CHECK(std::get<ProfileGrid>(r).values.size() == 6);
}

TEST_CASE("simulate and cv") {
  const std::string study_json = path("study.json");
  const Run sim = cli("simulate --target 2 --swarm 40 --iters 200 --out " + study_json);
  REQUIRE(sim.code == 0);
  const PersistedResult r = load_result(study_json);
  REQUIRE(std::holds_alternative<StudyReport>(r));
  const StudyReport& report = std::get<StudyReport>(r);
  CHECK(report.records.size() == 2);
  CHECK(report.summary.pso_not_worse == 2);
  CHECK(cli("simulate --beta1 0.5").code == 2);

  const Run cv = cli("cv --cohort 150 --rho 0 1 --folds 3 --swarm 20 --iters 30");
  CHECK(cv.code == 0);
  CHECK(contains(cv.output, "selected rho"));
  CHECK(cli("cv --folds 1").code == 2);
}
