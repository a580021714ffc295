#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "kr/cli.hpp"
#include "kr/generator.hpp"
#include "support.hpp"

using namespace kr;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::EndsWith;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run kr_run(std::vector<std::string> args) {
    args.insert(args.begin(), "kr");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Exit status of the built binary, so argument handling is covered end to end.
int kr_exit(const std::string& args) {
    const int status = std::system((std::string(KR_TOOL) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Workspace {
    test::TempDir dir;
    std::string onto = (test::data_dir() / "sip_ontology.json").string();
    std::string store = (dir / "store").string();

    std::string gen(const std::string& name, std::vector<std::string> inject, std::uint64_t seed = 3) {
        const auto csv = (dir / (name + ".csv")).string();
        std::vector<std::string> args{"gen-data", "--devices", "3", "--steps", "4000", "--seed", std::to_string(seed),
                                      "--out", csv};
        if (!inject.empty()) {
            args.push_back("--inject");
            for (auto& i : inject) args.push_back(i);
        }
        auto r = kr_run(args);
        REQUIRE(r.code == 0);
        return csv;
    }
};

}  // namespace

TEST_CASE("gen-data writes the dataset and its truth file", "[cli]") {
    Workspace w;
    const auto csv = w.gen("one", {"phase-shift@d01:1500", "high@2:2500"});
    CHECK(std::filesystem::exists(csv));
    auto truth = nlohmann::json::parse(test::read_file(w.dir / "one.truth.json"));
    CHECK(truth["injections"].size() == 2);
    CHECK(truth["injections"][0]["expected_name"] == "Phase Shift");
    std::ifstream in(csv);
    CHECK(read_csv(in).devices.size() == 3);

    auto bad = kr_run({"gen-data", "--out", (w.dir / "x.csv").string(), "--inject", "wobble@d00:5"});
    CHECK(bad.code == 1);
    CHECK_THAT(bad.err, ContainsSubstring("wobble"));
}

TEST_CASE("classify prints the class path per incident", "[cli]") {
    Workspace w;
    const auto csv = w.gen("high", {"high@d01:1500"});
    auto r = kr_run({"classify", "--data", csv, "--ontology", w.onto, "--store", w.store});
    REQUIRE(r.code == 0);
    const auto first = r.out.substr(0, r.out.find('\n'));
    CHECK(first.rfind("d01 [1500,1700) ", 0) == 0);
    CHECK_THAT(first, EndsWith("Abnormal Values [High]"));
    CHECK_THAT(r.out, ContainsSubstring("    range.hi = "));

    auto js = kr_run({"classify", "--data", csv, "--ontology", w.onto, "--store", w.store, "--json"});
    REQUIRE(js.code == 0);
    auto j = nlohmann::json::parse(js.out);
    CHECK(j["incidents"][0]["final_class"] == "AbnormalValues");
    CHECK(j["incidents"][0]["qualifier"] == "High");
    CHECK(j["labels"] == nlohmann::json::array({{{"device", "d01"}, {"class", "AbnormalValues"}}}));

    const auto quiet = w.gen("quiet", {});
    CHECK(kr_run({"classify", "--data", quiet, "--ontology", w.onto, "--store", w.store}).out == "no incidents\n");

    // Raising the alert threshold above every rating hides the incident.
    auto strict = kr_run({"classify", "--data", csv, "--ontology", w.onto, "--store", w.store, "--alert", "1", "--warning", "1"});
    CHECK(strict.out == "no incidents\n");
    CHECK(kr_run({"classify", "--data", csv, "--ontology", w.onto, "--store", w.store, "--warning", "0.9",
                  "--alert", "0.5"}).code == 2);
}

TEST_CASE("classify reports data and config errors with exit codes", "[cli]") {
    Workspace w;
    const auto bad_csv = (w.dir / "bad.csv").string();
    std::ofstream(bad_csv) << "timestamp,a,a__rating\n0,1,0\n1,oops,0\n";
    auto r = kr_run({"classify", "--data", bad_csv, "--ontology", w.onto, "--store", w.store});
    CHECK(r.code == 1);
    CHECK_THAT(r.err, ContainsSubstring("line 3"));

    const auto bad_onto = (w.dir / "onto.json").string();
    std::ofstream(bad_onto) << "{\"classes\": []}";
    const auto csv = w.gen("ok", {});
    CHECK(kr_run({"classify", "--data", csv, "--ontology", bad_onto, "--store", w.store}).code == 2);
    CHECK(kr_run({"classify", "--data", csv}).code == 2);
    CHECK(kr_run({"frobnicate"}).code == 2);

    CHECK(kr_exit("classify --data " + bad_csv + " --ontology " + w.onto + " --store " + w.store) == 1);
    CHECK(kr_exit("classify --data " + csv + " --ontology " + bad_onto + " --store " + w.store) == 2);
    CHECK(kr_exit("--help") == 0);
}

TEST_CASE("suggest ranks stored instances", "[cli]") {
    Workspace w;
    const auto csv = w.gen("fp", {"false-positive@d00:1500"});
    CHECK(kr_run({"suggest", "--data", csv, "--ontology", w.onto, "--store", w.store}).out == "no suggestions\n");

    // Store the flagged stretch itself as a benign pattern.
    std::ifstream in(csv);
    auto data = read_csv(in);
    const auto& s = data.at("d00");
    StoredInstance fp;
    fp.name = "known benign";
    fp.segments["d00"] = test::series("d00", std::vector<double>(s.readings.begin() + 1500, s.readings.begin() + 1700));
    fp.labels.insert({"d00", "FalsePositive"});
    auto draft = to_json(fp);
    draft.erase("id");
    const auto file = (w.dir / "fp.json").string();
    std::ofstream(file) << draft.dump();
    auto added = kr_run({"store", "--store", w.store, "add", file, "--ontology", w.onto});
    REQUIRE(added.code == 0);
    CHECK(added.out == "inst-000001\n");

    auto cls = kr_run({"classify", "--data", csv, "--ontology", w.onto, "--store", w.store});
    CHECK_THAT(cls.out, ContainsSubstring("Incident > False Positive"));

    auto r = kr_run({"suggest", "--data", csv, "--ontology", w.onto, "--store", w.store});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("inst-000001 rank_value=", 0) == 0);
    CHECK_THAT(r.out, ContainsSubstring("labels=d00:FalsePositive offset=1500"));
    auto j = nlohmann::json::parse(
        kr_run({"suggest", "--data", csv, "--ontology", w.onto, "--store", w.store, "--json"}).out);
    REQUIRE(j.size() == 1);
    CHECK(j[0]["rank_value"].get<double>() < 1e-6);
    auto sim = nlohmann::json::parse(kr_run({"suggest", "--data", csv, "--ontology", w.onto, "--store", w.store,
                                             "--json", "--mode", "similarity"})
                                         .out);
    CHECK(sim[0]["rank_value"].get<double>() == Catch::Approx(1.0).margin(1e-6));
    CHECK(kr_run({"suggest", "--data", csv, "--ontology", w.onto, "--store", w.store, "--mode", "fuzzy"}).code == 2);
}

TEST_CASE("store subcommands", "[cli]") {
    Workspace w;
    StoredInstance d;
    d.name = "pump";
    d.segments["d00"] = test::series("d00", {1, 2, 3, 4});
    d.labels.insert({"d00", "PhaseShift"});
    const auto file = (w.dir / "i.json").string();
    std::ofstream(file) << to_json(d).dump();

    CHECK(kr_run({"store", "--store", w.store, "add", file, "--ontology", w.onto}).out == "inst-000001\n");
    CHECK(kr_run({"store", "--store", w.store, "add", file, "--ontology", w.onto}).out == "inst-000002\n");
    auto list = kr_run({"store", "--store", w.store, "list"});
    CHECK(list.out == "inst-000001\tpump\td00:PhaseShift\ninst-000002\tpump\td00:PhaseShift\n");
    auto show = kr_run({"store", "--store", w.store, "show", "inst-000002"});
    CHECK(nlohmann::json::parse(show.out)["name"] == "pump");
    CHECK(kr_run({"store", "--store", w.store, "rm", "inst-000001"}).out == "removed inst-000001\n");
    CHECK(kr_run({"store", "--store", w.store, "show", "inst-000001"}).code == 1);
    CHECK(kr_run({"store", "--store", w.store, "list"}).out == "inst-000002\tpump\td00:PhaseShift\n");

    CHECK(kr_run({"store", "--store", w.store, "range", "d00", "-1.5", "2"}).code == 0);
    CHECK(KnowledgeStore::open(w.store).get_normal_range("d00") == NormalRange{"d00", -1.5, 2.0});
    CHECK(kr_run({"store", "--store", w.store, "range", "d00", "3", "2"}).code == 1);

    d.labels = {{"d00", "Bogus"}};
    std::ofstream(file) << to_json(d).dump();
    auto bad = kr_run({"store", "--store", w.store, "add", file, "--ontology", w.onto});
    CHECK(bad.code == 1);
    CHECK_THAT(bad.err, ContainsSubstring("Bogus"));
}

TEST_CASE("ontology subcommands", "[cli]") {
    Workspace w;
    auto ok = kr_run({"ontology", "validate", w.onto});
    CHECK(ok.code == 0);
    CHECK(ok.out == "ok: 11 classes\n");

    auto tree = kr_run({"ontology", "show", w.onto, "--tree"});
    REQUIRE(tree.code == 0);
    const auto periodic = tree.out.find("\n      Periodic (Periodic)");
    const auto phase = tree.out.find("\n        Phase Shift (PhaseShift) triggers=[1]");
    CHECK(periodic != std::string::npos);
    CHECK(phase != std::string::npos);
    CHECK(phase > periodic);
    CHECK(tree.out.rfind("Incident (Incident) callback=callbackFalsePositiveCheck\n", 0) == 0);

    auto doc = kr_run({"ontology", "show", w.onto});
    CHECK(parse_ontology(doc.out).size() == 11);

    // Two siblings answering the same trigger.
    auto j = nlohmann::json::parse(test::read_file(w.onto));
    for (auto& c : j["classes"])
        if (c["id"] == "FrequencyChange") c["triggers"] = nlohmann::json::array({"1"});
    const auto clash = (w.dir / "clash.json").string();
    std::ofstream(clash) << j.dump();
    CHECK(kr_run({"ontology", "validate", clash}).code != 0);
    CHECK(kr_exit("ontology validate " + clash) == 2);

    j = nlohmann::json::parse(test::read_file(w.onto));
    for (auto& c : j["classes"])
        if (c["id"] == "NotPeriodic") c["callback"] = "callbackMissing";
    const auto missing = (w.dir / "missing.json").string();
    std::ofstream(missing) << j.dump();
    auto m = kr_run({"ontology", "validate", missing});
    CHECK(m.code == 2);
    CHECK_THAT(m.out, ContainsSubstring("missing callback at NotPeriodic"));
}

TEST_CASE("serve loads its config and listens", "[cli]") {
    Workspace w;
    const auto csv = w.gen("serve", {"high@d00:1500"});
    std::filesystem::create_directories(w.store);
    nlohmann::json cfg = {{"listen", {{"host", "127.0.0.1"}, {"port", 8123}}},
                          {"data", csv},
                          {"store", w.store},
                          {"ontology", w.onto}};
    const auto file = (w.dir / "kr.json").string();
    std::ofstream(file) << cfg.dump();

    auto dry = kr_run({"serve", "--config", file, "--dry-run"});
    CHECK(dry.code == 0);
    CHECK(dry.out == "would listen on 127.0.0.1:8123\n");
    CHECK(kr_run({"serve", "--config", file, "--dry-run", "--port", "9100"}).out == "would listen on 127.0.0.1:9100\n");

    cfg["store"] = (w.dir / "absent").string();
    const auto broken = (w.dir / "broken.json").string();
    std::ofstream(broken) << cfg.dump();
    CHECK(kr_run({"serve", "--config", broken, "--dry-run"}).code == 2);
    CHECK(kr_exit("serve --config " + broken) == 2);
    CHECK(kr_exit("serve --config " + (w.dir / "none.json").string()) == 2);

    // A live server on a free port answers the API until it is killed.
    FILE* p = popen(("timeout 20 " + std::string(KR_TOOL) + " serve --config " + file + " --port 0").c_str(), "r");
    REQUIRE(p);
    char line[256] = {};
    REQUIRE(std::fgets(line, sizeof line, p));
    const std::string banner(line);
    REQUIRE(banner.rfind("listening on 127.0.0.1:", 0) == 0);
    const int port = std::stoi(banner.substr(banner.rfind(':') + 1));
    httplib::Client cli("127.0.0.1", port);
    auto res = cli.Get("/api/incidents");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body)["incidents"][0]["final_class"] == "AbnormalValues");
    [[maybe_unused]] const int killed = std::system(("pkill -f 'kr serve --config " + file + "'").c_str());
    pclose(p);
}
