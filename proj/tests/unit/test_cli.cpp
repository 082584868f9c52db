#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dschat/dataset/summary.hpp"
#include "dschat/json.hpp"
#include "dschat/petel/petel.hpp"
#include "dschat/results/results.hpp"

using namespace dschat;

namespace {

const std::filesystem::path kRoot = DSCHAT_SOURCE_DIR;
const std::string kCli = DSCHAT_CLI;
const std::string kLog = (kRoot / "data/transcripts/student_session_log/28e837c5cb41dc3e.jsonl").string();
const std::string kScript = (kRoot / "data/transcripts/student_session.script.jsonl").string();

struct Run {
  int code = -1;
  std::string out;
};

// stdout only; stderr goes to /dev/null.
Run run(const std::string& args) {
  Run r;
  const std::string cmd = "'" + kCli + "' " + args + " 2>/dev/null";
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("dschat_cli_" + std::to_string(::getpid()) + "_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST_CASE("replay prints the state trajectory of the bundled session") {
  auto r = run("replay --log " + q(kLog));
  CHECK(r.code == 0);
  CHECK(r.out.find("data_visualization → task_selection → task_formulation → model_training") != std::string::npos);
  CHECK(r.out.find("final_grade") != std::string::npos);

  auto j = run("replay --json --log " + q(kLog));
  REQUIRE(j.code == 0);
  const auto doc = Json::parse(j.out);
  CHECK(doc.at("trajectory") ==
        Json::array({"data_visualization", "task_selection", "task_formulation", "model_training"}));
  CHECK(doc.at("violations").empty());
  CHECK(doc.at("session").at("state") == "model_training");
  const auto golden = petel::petel_from_json(
      Json::parse(std::ifstream(kRoot / "data/transcripts/student_session.golden.json")));
  CHECK(petel::petel_from_json(doc.at("session").at("petel")) == golden);
  CHECK(Json::parse(doc.dump()) == doc);
}

TEST_CASE("replay exits nonzero on an invariant violation") {
  std::ifstream in(kLog);
  std::string line, text;
  while (std::getline(in, line)) {
    auto rec = Json::parse(line);
    if (rec.at("kind") == "state_change" && rec.at("to") == "task_selection") rec["to"] = "model_training";
    text += rec.dump() + "\n";
  }
  const auto bad = temp_file("bad.jsonl", text);
  auto r = run("replay --log " + q(bad));
  CHECK(r.code == 3);
  auto rj = run("replay --json --log " + q(bad));
  CHECK(rj.code == 3);
  CHECK_FALSE(Json::parse(rj.out).at("violations").empty());
  std::filesystem::remove(bad);
}

TEST_CASE("run-petel with the builtin backend reports the majority fraction") {
  const auto petel = kRoot / "data/fixtures/flight_delay.petel";
  const auto data = kRoot / "data/fixtures/flights_toy.csv";
  auto r = run("run-petel --petel " + q(petel) + " --dataset " + q(data) + " --backend builtin");
  CHECK(r.code == 0);
  CHECK(r.out.find("rows after filters: 6 of 16") != std::string::npos);
  CHECK(r.out.find("| 1 | majority_class_baseline | ok | 0.6667 |") != std::string::npos);

  auto j = run("run-petel --json --petel " + q(petel) + " --dataset " + q(data) + " --backend builtin");
  REQUIRE(j.code == 0);
  const auto doc = Json::parse(j.out);
  CHECK(doc.at("rows") == 6);
  const auto summary = results::ResultSummary::from_json(doc.at("results"));
  CHECK(summary.to_json() == doc.at("results"));
  CHECK(summary.recommended == "majority_class_baseline");
  for (const auto& row : summary.rows) {
    if (row.method == "majority_class_baseline") CHECK(row.metrics.at("accuracy").get<double>() == doctest::Approx(4.0 / 6.0));
  }
}

TEST_CASE("summarize") {
  const auto empty = temp_file("empty.csv", "");
  auto r = run("summarize --dataset " + q(empty) + " --scripted " + q(kScript));
  CHECK(r.code == 3);
  auto rj = run("summarize --json --dataset " + q(empty) + " --scripted " + q(kScript));
  CHECK(rj.code == 3);
  CHECK(Json::parse(rj.out).at("error").at("code") == "EmptyInput");
  std::filesystem::remove(empty);

  auto ok = run("summarize --json --dataset " + q(kRoot / "data/fixtures/student_performance.csv") + " --scripted " +
                q(kScript));
  REQUIRE(ok.code == 0);
  const auto doc = Json::parse(ok.out);
  const auto s = dataset::DatasetSummary::from_json(doc.at("summary"));
  CHECK(s.to_json() == doc.at("summary"));
  CHECK(s.summary.rfind("This dataset contains information about students", 0) == 0);
  CHECK(doc.at("suggestions").at("tasks").size() == 2);
}

TEST_CASE("chat over the scripted session") {
  const auto dir = std::filesystem::temp_directory_path() / ("dschat_cli_chat_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  auto r = run("chat --json --strict --dataset " + q(kRoot / "data/fixtures/student_performance.csv") +
               " --scripted " + q(kScript) + " --utterances " +
               q(kRoot / "data/transcripts/student_session.turns.json") + " --data-dir " + q(dir));
  REQUIRE(r.code == 0);
  const auto doc = Json::parse(r.out);
  CHECK(doc.at("session").at("state") == "model_training");
  CHECK(doc.at("turns").size() == 12);
  CHECK(doc.at("turns")[1].at("reply").get<std::string>().find("size of your dataset") != std::string::npos);
  CHECK(doc.at("results").at("recommended") == "majority_class_baseline");
  REQUIRE(doc.contains("log"));
  auto rep = run("replay --log " + q(doc.at("log").get<std::string>()));
  CHECK(rep.code == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("usage errors exit 2, provider failures exit 4") {
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("replay").code == 2);
  CHECK(run("run-petel --petel /nonexistent --dataset /nonexistent").code == 2);
  CHECK(run("chat --level 9 --dataset " + q(kRoot / "data/fixtures/student_performance.csv")).code == 2);
  CHECK(run("--help").code == 0);

  // A script with no entries fails on the first provider call.
  const auto empty_script = temp_file("empty.jsonl", "");
  auto r = run("summarize --dataset " + q(kRoot / "data/fixtures/student_performance.csv") + " --scripted " +
               q(empty_script));
  CHECK(r.code == 4);
  std::filesystem::remove(empty_script);

  const auto petel = kRoot / "data/fixtures/flight_delay.petel";
  const auto data = kRoot / "data/fixtures/flights_toy.csv";
  CHECK(run("run-petel --petel " + q(petel) + " --dataset " + q(data) + " --backend http://127.0.0.1:1").code == 4);
  const auto bad_petel = temp_file("bad.petel", "{problem_type: classification, colour: blue}");
  CHECK(run("run-petel --petel " + q(bad_petel) + " --dataset " + q(data)).code == 3);
  std::filesystem::remove(bad_petel);
}
