#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/fixtures.hpp"
#include "cli.hpp"

using namespace skinbench;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "skinbench");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Synthetic dataset with two separable images plus a trained histogram.
struct Workspace {
    TempDir dir;
    fs::path manifest;
    std::vector<testsupport::LabelledImage> data;

    explicit Workspace(int n = 2, std::uint64_t seed = 1) {
        std::mt19937_64 rng(seed);
        for (int i = 0; i < n; ++i) data.push_back(testsupport::separable_sample(rng, 64, 48));
        manifest = testsupport::write_dataset(dir.path(), data);
    }
    fs::path operator/(const std::string& s) const { return dir / s; }
};

void write_mask_file(const fs::path& p, int w, int skin_pixels, int offset = 0) {
    LabelMask m(w, 1, Label::NonSkin);
    for (int i = 0; i < skin_pixels; ++i) m[std::size_t(offset + i)] = Label::Skin;
    save_mask(m, p);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"bogus"}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
    CHECK(run({"detect"}).code == cli::kExitUsage);
}

TEST_CASE("train bayes then classify the training colors") {
    Workspace ws;
    const auto r = run({"train", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "h.sknd").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("bins=32") != std::string::npos);
    CHECK(r.out.find("pixels=6144") != std::string::npos);
    ModelSet models;
    models.add_file(ws / "h.sknd");
    for (const auto& s : ws.data)
        CHECK(detect(DetectorSettings::with_defaults(Method::Bayes), s.image, models) == s.truth);
}

TEST_CASE("train gmm is byte identical for a seed") {
    Workspace ws;
    for (const char* name : {"a.sknd", "b.sknd"})
        REQUIRE(run({"train", "gmm", "--manifest", ws.manifest.string(), "-o", (ws / name).string(), "--seed", "7",
                     "--components", "3"})
                    .code == 0);
    CHECK(testsupport::read_bytes(ws / "a.sknd") == testsupport::read_bytes(ws / "b.sknd"));
    CHECK(std::holds_alternative<GmmModel>(load_model_file(ws / "a.sknd")));
}

TEST_CASE("train cheddad and lda") {
    Workspace ws(8);
    REQUIRE(run({"train", "cheddad", "--manifest", ws.manifest.string(), "-o", (ws / "c.sknd").string()}).code == 0);
    CHECK(std::holds_alternative<CheddadModel>(load_model_file(ws / "c.sknd")));

    const auto no_base = run({"train", "lda", "--manifest", ws.manifest.string(), "-o", (ws / "l.sknd").string()});
    CHECK(no_base.code == cli::kExitUsage);
    CHECK(no_base.err.find("--base") != std::string::npos);
    CHECK_FALSE(fs::exists(ws / "l.sknd"));

    REQUIRE(run({"train", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "h.sknd").string()}).code == 0);
    const auto r = run({"train", "lda", "--manifest", ws.manifest.string(), "-o", (ws / "l.sknd").string(), "--base",
                        "bayes", "--model", (ws / "h.sknd").string()});
    CHECK(r.code == 0);
    CHECK(std::holds_alternative<LdaModel>(load_model_file(ws / "l.sknd")));
    CHECK(run({"train", "chen", "--manifest", ws.manifest.string(), "-o", (ws / "x").string()}).code ==
          cli::kExitUsage);
}

TEST_CASE("detect chen equals the library call") {
    Workspace ws;
    REQUIRE(run({"detect", "chen", "--manifest", ws.manifest.string(), "-o", (ws / "out").string()}).code == 0);
    for (std::size_t i = 0; i < ws.data.size(); ++i)
        CHECK(load_mask(ws / ("out/data_" + std::to_string(i) + ".png")) == chen_detect(ws.data[i].image));
}

TEST_CASE("detect bayes --tau equals the thresholded map") {
    Workspace ws;
    REQUIRE(run({"train", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "h.sknd").string()}).code == 0);
    const auto h = std::get<HistogramModel>(load_model_file(ws / "h.sknd"));
    const auto r = run({"detect", "bayes", "--input-dir", (ws / "data").string(), "-o", (ws / "out").string(),
                        "--model", (ws / "h.sknd").string(), "--tau", "110", "--dump-maps", (ws / "maps").string()});
    // the input dir also holds the ground-truth PNGs; they decode as gray images
    REQUIRE(r.code == 0);
    const Image img = load_image(ws / "data/data_0.png");
    CHECK(load_mask(ws / "out/data_0.png") == threshold_map(bayes_map(h, img), Threshold8(110)));
    CHECK(fs::exists(ws / "maps/data_0.png"));
}

TEST_CASE("detect validates models before processing") {
    Workspace ws;
    const auto r = run({"detect", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "out").string()});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("histogram") != std::string::npos);
    CHECK_FALSE(fs::exists(ws / "out"));
    CHECK(run({"detect", "nosuch", "--manifest", ws.manifest.string(), "-o", (ws / "o").string()}).code ==
          cli::kExitUsage);
    CHECK(run({"detect", "chen", "--manifest", ws.manifest.string(), "--input-dir", ".", "-o", "x"}).code ==
          cli::kExitUsage);
}

TEST_CASE("detect reports per-image failures with a nonzero exit") {
    Workspace ws;
    std::ofstream(ws / "data/broken.png") << "garbage";
    const auto r = run({"detect", "chen", "--input-dir", (ws / "data").string(), "-o", (ws / "out").string()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.find("broken.png") != std::string::npos);
    CHECK(fs::exists(ws / "out/data_0.png"));
}

TEST_CASE("outputs do not depend on the worker count") {
    Workspace ws(6, 4);
    REQUIRE(run({"train", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "h.sknd").string(), "--workers",
                 "1"})
                .code == 0);
    REQUIRE(run({"train", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "h3.sknd").string(), "--workers",
                 "3"})
                .code == 0);
    CHECK(testsupport::read_bytes(ws / "h.sknd") == testsupport::read_bytes(ws / "h3.sknd"));
    for (const char* w : {"1", "4"})
        REQUIRE(run({"detect", "sa1", "--manifest", ws.manifest.string(), "-o", (ws / ("o" + std::string(w))).string(),
                     "--model", (ws / "h.sknd").string(), "--workers", w})
                    .code == 0);
    for (int i = 0; i < 6; ++i) {
        const std::string f = "data_" + std::to_string(i) + ".png";
        CHECK(testsupport::read_bytes(ws / ("o1/" + f)) == testsupport::read_bytes(ws / ("o4/" + f)));
    }
    const auto e1 = run({"eval", "--pred", (ws / "o1").string(), "--manifest", ws.manifest.string(), "--workers", "1"});
    const auto e4 = run({"eval", "--pred", (ws / "o4").string(), "--manifest", ws.manifest.string(), "--workers", "4",
                         "--method", "o1"});
    CHECK(e1.out == e4.out);
}

TEST_CASE("preset emits the built-in configurations") {
    const auto r = run({"preset", "vote1", "--wtau", "1.5"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const EnsembleConfig cfg = EnsembleConfig::parse(in);
    CHECK(cfg.wtau == 1.5);
    std::vector<double> w;
    for (const auto& m : cfg.members) w.push_back(m.weight);
    CHECK(w == std::vector<double>{0.5, 1.5, 1, 1.5, 0.5, 1, 0, 0, 0});
    CHECK(cfg.members[0].tau == 175);
    CHECK(cfg.members[5].tau == 110);
    CHECK(run({"preset", "vote9"}).code == cli::kExitUsage);
}

TEST_CASE("ensemble preset vote4 without maps names the missing members") {
    Workspace ws;
    const auto r = run({"ensemble", "--preset", "vote4", "--manifest", ws.manifest.string(), "-o", (ws / "o").string()});
    CHECK(r.code == cli::kExitUsage);
    for (const char* m : {"segnet", "unet", "deeplab"}) CHECK(r.err.find(m) != std::string::npos);
}

TEST_CASE("single-member ensemble equals detect") {
    Workspace ws;
    std::ofstream(ws / "one.cfg") << "wtau 2\nmember name=dyc weight=1\n";
    REQUIRE(run({"ensemble", "--config", (ws / "one.cfg").string(), "--manifest", ws.manifest.string(), "-o",
                 (ws / "ens").string()})
                .code == 0);
    REQUIRE(run({"detect", "dyc", "--manifest", ws.manifest.string(), "-o", (ws / "det").string()}).code == 0);
    for (int i = 0; i < 2; ++i) {
        const std::string f = "data_" + std::to_string(i) + ".png";
        CHECK(testsupport::read_bytes(ws / ("ens/" + f)) == testsupport::read_bytes(ws / ("det/" + f)));
    }
    std::ofstream(ws / "bad.cfg") << "wtau 2\nmember name=dyc weight=x\n";
    const auto bad = run({"ensemble", "--config", (ws / "bad.cfg").string(), "--manifest", ws.manifest.string(), "-o",
                          (ws / "e2").string()});
    CHECK(bad.code == cli::kExitUsage);
    CHECK(bad.err.find("line 2") != std::string::npos);
}

TEST_CASE("ensemble with external maps") {
    Workspace ws;
    fs::create_directories(ws / "seg");
    for (std::size_t i = 0; i < ws.data.size(); ++i) {
        ProbabilityMap m(64, 48);
        for (std::size_t p = 0; p < m.size(); ++p) m[p] = ws.data[i].truth[p] == Label::Skin ? 1.0 : 0.0;
        save_probability_map(m, ws / ("seg/data_" + std::to_string(i) + ".png"));
    }
    std::ofstream(ws / "e.cfg") << "wtau 1.5\nmember name=segnet weight=3\nmember name=chen weight=1\n";
    const auto r = run({"ensemble", "--config", (ws / "e.cfg").string(), "--map", "segnet=" + (ws / "seg").string(),
                        "--manifest", ws.manifest.string(), "-o", (ws / "o").string()});
    REQUIRE(r.code == 0);
    CHECK(load_mask(ws / "o/data_1.png") == ws.data[1].truth);
}

TEST_CASE("eval perfect predictions") {
    Workspace ws;
    fs::create_directories(ws / "pred");
    for (std::size_t i = 0; i < ws.data.size(); ++i)
        save_mask(ws.data[i].truth, ws / ("pred/data_" + std::to_string(i) + ".png"));
    const auto r = run({"eval", "--pred", (ws / "pred").string(), "--manifest", ws.manifest.string(), "--method", "m",
                        "--dataset", "d"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "method,dataset,tau,precision,recall,F1,TPR,FPR,AP,rank\nm,d,,1,1,1,1,0,,\n");
}

TEST_CASE("eval group average") {
    TempDir dir;
    fs::create_directories(dir / "pred");
    write_mask_file(dir / "a_gt.png", 10, 5);
    write_mask_file(dir / "pred/a.png", 10, 5, 1);  // tp 4, fp 1, fn 1
    write_mask_file(dir / "b_gt.png", 10, 5);
    write_mask_file(dir / "pred/b.png", 10, 5, 2);  // tp 3, fp 2, fn 2
    std::ofstream(dir / "m.tsv") << "a.png\ta_gt.png\tv1\nb.png\tb_gt.png\tv2\n";
    const auto r = run({"eval", "--pred", (dir / "pred").string(), "--manifest", (dir / "m.tsv").string(),
                        "--group-average", "-o", (dir / "r.csv").string()});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "r.csv");
    const auto rows = read_report_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].metrics->f1 == doctest::Approx(0.7).epsilon(1e-12));
    std::ofstream(dir / "m2.tsv") << "a.png\ta_gt.png\n";
    CHECK(run({"eval", "--pred", (dir / "pred").string(), "--manifest", (dir / "m2.tsv").string(), "--group-average"})
              .code == cli::kExitFailure);
}

TEST_CASE("eval ap protocol") {
    TempDir dir;
    fs::create_directories(dir / "pred");
    write_mask_file(dir / "pred/f1.png", 10, 5);
    write_mask_file(dir / "pred/f2.png", 10, 2);
    write_mask_file(dir / "pred/n1.png", 10, 3);
    write_mask_file(dir / "pred/n2.png", 10, 1);
    std::ofstream(dir / "fnf.tsv") << "f1.png\t-\tface\nf2.png\t-\tface\nn1.png\t-\tnonface\nn2.png\t-\tnonface\n";
    const auto r = run({"eval", "--pred", (dir / "pred").string(), "--manifest", (dir / "fnf.tsv").string(), "--ap",
                        "--method", "x", "-o", (dir / "ap.csv").string()});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "ap.csv");
    const auto rows = read_report_csv(in);
    CHECK(*rows[0].ap == doctest::Approx(83.3333333333).epsilon(1e-9));
    CHECK(rows[0].dataset == "fnf");
}

TEST_CASE("eval sweep reads probability maps") {
    Workspace ws;
    REQUIRE(run({"train", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "h.sknd").string()}).code == 0);
    REQUIRE(run({"detect", "bayes", "--manifest", ws.manifest.string(), "-o", (ws / "o").string(), "--model",
                 (ws / "h.sknd").string(), "--dump-maps", (ws / "maps").string()})
                .code == 0);
    const auto r = run({"eval", "--pred", (ws / "maps").string(), "--manifest", ws.manifest.string(), "--sweep",
                        "50,70,90,110,140"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto rows = read_report_csv(in);
    REQUIRE(rows.size() == 5);
    CHECK(*rows[3].tau == 110);
    CHECK(rows[3].metrics->f1 == 1.0);
    CHECK(run({"eval", "--pred", (ws / "maps").string(), "--manifest", ws.manifest.string(), "--sweep", "1,x"}).code ==
          cli::kExitUsage);
}

TEST_CASE("eval lists missing predictions") {
    Workspace ws;
    fs::create_directories(ws / "pred");
    save_mask(ws.data[0].truth, ws / "pred/data_0.png");
    const auto r = run({"eval", "--pred", (ws / "pred").string(), "--manifest", ws.manifest.string()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.find("data_1") != std::string::npos);
}

TEST_CASE("compare") {
    TempDir dir;
    auto report = [&](const std::string& name, const std::string& method, std::vector<std::pair<std::string, double>> s) {
        std::vector<ReportRow> rows;
        for (auto& [d, f1] : s) {
            ReportRow r;
            r.method = method;
            r.dataset = d;
            Metrics m;
            m.f1 = f1;
            r.metrics = m;
            rows.push_back(r);
        }
        std::ofstream out(dir / name);
        write_report_csv(out, rows);
        return (dir / name).string();
    };
    const auto a = report("a.csv", "alpha", {{"d1", 0.9}, {"d2", 0.8}});
    const auto b = report("b.csv", "beta", {{"d1", 0.5}, {"d2", 0.7}});
    const auto r = run({"compare", a, b, "-o", (dir / "cmp.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "cmp.csv") == "method,d1,d2,avg_rank,rank\nalpha,0.9,0.8,1,1\nbeta,0.5,0.7,2,2\n");

    const auto c = report("c.csv", "gamma", {{"d1", 0.5}});
    const auto bad = run({"compare", a, c});
    CHECK(bad.code == cli::kExitFailure);
    CHECK(bad.err.find("gamma/d2") != std::string::npos);
}

}
