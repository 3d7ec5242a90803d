#include <fstream>
#include <sstream>

#include "doctest.h"
#include "slads/cli.hpp"
#include "slads/pgm.hpp"
#include "slads/rng.hpp"
#include "slads/training.hpp"
#include "slads/synth.hpp"
#include "support/tmpdir.hpp"

using namespace slads;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result slads_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "slads");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

/// Scratch dir with two blob training images and one test image.
struct Fixture {
    fs::path dir;
    std::string train_a, train_b, test;

    explicit Fixture(const std::string& name) : dir(testing::scratch_dir(name)) {
        train_a = (dir / "a.pgm").string();
        train_b = (dir / "b.pgm").string();
        test = (dir / "t.pgm").string();
        write_pgm(train_a, synth::blobs(Dims{32, 32}, 1));
        write_pgm(train_b, synth::blobs(Dims{32, 32}, 2));
        write_pgm(test, synth::blobs(Dims{32, 32}, 3));
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    std::vector<std::string> quick_train(const std::string& out, const std::string& regressor = "nn") const {
        return {"train", "--images", train_a, train_b, "--out", out, "--regressor", regressor,
                "--samples-per-level", "30", "--epochs", "5", "--hidden", "8,8", "--seed", "4"};
    }
};

}  // namespace

TEST_CASE("cli train: writes a loadable model and is byte-reproducible") {
    Fixture fx("train");
    const auto r1 = slads_cli(fx.quick_train(fx.path("m1.slm")));
    REQUIRE_MESSAGE(r1.code == 0, r1.err);
    CHECK(r1.out.find("trained nn") != std::string::npos);
    REQUIRE(slads_cli(fx.quick_train(fx.path("m2.slm"))).code == 0);
    CHECK(slurp(fx.path("m1.slm")) == slurp(fx.path("m2.slm")));

    const ErdModel m = load_model(fx.path("m1.slm"));
    CHECK(m.kind == RegressorKind::nn);
    CHECK(m.metadata["pretrained"] == false);
    CHECK(m.metadata["images"].size() == 2);
    CHECK(m.metadata["images"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(m.metadata["rows"] == 2 * 6 * 30);
    CHECK(m.metadata.contains("final_loss"));

    REQUIRE(slads_cli(fx.quick_train(fx.path("lsq.slm"), "lsq")).code == 0);
    CHECK(load_model(fx.path("lsq.slm")).metadata.contains("residual_norm"));

    const auto db = fx.path("db.csv");
    auto args = fx.quick_train(fx.path("m3.slm"), "lsq");
    args.insert(args.end(), {"--db-csv", db, "--densities", "0.1,0.2"});
    REQUIRE(slads_cli(args).code == 0);
    const std::string csv = slurp(db);
    CHECK(csv.rfind("image_id,density,f1,f2,f3,f4,f5,f6,rd\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 30);
}

TEST_CASE("cli: usage errors exit 1 and name the problem") {
    Fixture fx("usage");
    auto bogus = slads_cli(fx.quick_train(fx.path("x.slm"), "bogus"));
    CHECK(bogus.code == cli::kExitUsage);
    CHECK(bogus.err.find("lsq") != std::string::npos);
    CHECK_FALSE(fs::exists(fx.path("x.slm")));

    CHECK(slads_cli({}).code == cli::kExitUsage);
    CHECK(slads_cli({"frobnicate"}).code == cli::kExitUsage);
    CHECK(slads_cli({"run", "--image", fx.test}).code == cli::kExitUsage);

    const auto order = slads_cli({"run", "--method", "random", "--image", fx.test, "--out", fx.path("o"),
                                  "--initial", "0.5", "--budget", "0.4"});
    CHECK(order.code == cli::kExitUsage);
    CHECK_FALSE(order.err.empty());

    CHECK(slads_cli({"run", "--image", fx.test, "--out", fx.path("o")}).code == cli::kExitUsage);
    CHECK(slads_cli({"synth", "--family", "nope", "--out", fx.path("s.pgm")}).code == cli::kExitUsage);
    CHECK(slads_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("cli: missing or corrupt inputs exit 2") {
    Fixture fx("io");
    CHECK(slads_cli({"run", "--method", "random", "--image", fx.path("missing.pgm"), "--out", fx.path("o")}).code ==
          cli::kExitIo);
    write_text(fx.path("bad.slm"), "not a model");
    CHECK(slads_cli({"run", "--model", fx.path("bad.slm"), "--image", fx.test, "--out", fx.path("o")}).code ==
          cli::kExitIo);
    write_text(fx.path("bad.pgm"), "P5\n4 4\n255\nab");
    CHECK(slads_cli({"train", "--images", fx.path("bad.pgm"), "--out", fx.path("m.slm")}).code == cli::kExitIo);
}

TEST_CASE("cli run: checkpoint outputs and reproducible history") {
    Fixture fx("run");
    REQUIRE(slads_cli(fx.quick_train(fx.path("m.slm"))).code == 0);
    const std::vector<std::string> base{"run", "--model", fx.path("m.slm"), "--image", fx.test, "--seed", "3"};
    auto a = base;
    a.insert(a.end(), {"--out", fx.path("ra")});
    auto b = base;
    b.insert(b.end(), {"--out", fx.path("rb"), "--scoring", "full"});
    const auto r = slads_cli(a);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.rfind("nn: psnr@0.4=", 0) == 0);
    REQUIRE(slads_cli(b).code == 0);

    for (const char* tag : {"10", "20", "30", "40"}) {
        const auto mask = parse_pgm(read_file_bytes(fx.path("ra") + "/mask_" + tag + ".pgm"));
        const auto recon = parse_pgm(read_file_bytes(fx.path("ra") + "/recon_" + tag + ".pgm"));
        CHECK(mask.dims == Dims{32, 32});
        CHECK(recon.dims == Dims{32, 32});
        const auto on = std::count(mask.pixels.begin(), mask.pixels.end(), 255);
        CHECK(static_cast<std::size_t>(on) == pixels_for_density(std::stoi(tag) / 100.0, 1024));
    }
    CHECK(slurp(fx.path("ra") + "/history.csv") == slurp(fx.path("rb") + "/history.csv"));
    CHECK(slurp(fx.path("ra") + "/mask_40.pgm") == slurp(fx.path("rb") + "/mask_40.pgm"));
    CHECK(slurp(fx.path("ra") + "/run.cfg").find("seed") != std::string::npos);

    // budget below the last checkpoint: budget becomes the final checkpoint
    const auto rnd = slads_cli({"run", "--method", "random", "--image", fx.test, "--out", fx.path("rr"),
                                "--budget", "0.25"});
    REQUIRE(rnd.code == 0);
    CHECK(fs::exists(fx.path("rr") + "/mask_25.pgm"));
    CHECK_FALSE(fs::exists(fx.path("rr") + "/mask_30.pgm"));
}

TEST_CASE("cli eval: report format, full sampling and single repeat") {
    Fixture fx("eval");
    const auto full = slads_cli({"eval", "--image", fx.test, "--method", "random", "--budget", "1.0",
                                 "--checkpoints", "1.0", "--repeats", "3", "--out", fx.path("full.csv")});
    REQUIRE_MESSAGE(full.code == 0, full.err);
    CHECK(full.out == slurp(fx.path("full.csv")));
    std::istringstream lines(full.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "method,density,psnr_mean,psnr_std,distortion_mean,wall_time_mean_s");
    CHECK(row.rfind("random,1,99,0,0,", 0) == 0);

    REQUIRE(slads_cli(fx.quick_train(fx.path("m.slm"))).code == 0);
    REQUIRE(slads_cli(fx.quick_train(fx.path("m2.slm"), "lsq")).code == 0);
    const std::vector<std::string> once{"eval",     "--images", fx.test,   fx.train_a, "--method", "random",
                                        "--model",  fx.path("m.slm"), fx.path("m2.slm"), "--repeats", "1",
                                        "--budget", "0.2", "--no-timing"};
    auto args = once;
    args.insert(args.end(), {"--out", fx.path("once.csv")});
    const auto r = slads_cli(args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::istringstream in(r.out);
    std::getline(in, header);
    std::vector<std::string> methods;
    while (std::getline(in, row)) {
        std::vector<std::string> cells;
        std::stringstream ss(row);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        REQUIRE(cells.size() == 6);
        methods.push_back(cells[0]);
        // averaged over two images: spread is across images, not zero in general
        CHECK(std::stod(cells[3]) >= 0.0);
    }
    CHECK(methods == std::vector<std::string>{"random", "random", "nn", "nn", "lsq", "lsq"});
    auto again = once;
    again.insert(again.end(), {"--out", fx.path("once2.csv")});
    REQUIRE(slads_cli(again).code == 0);
    CHECK(slurp(fx.path("once.csv")) == slurp(fx.path("once2.csv")));
    CHECK(r.out.find(",0\n") != std::string::npos);

    const auto one = slads_cli({"eval", "--image", fx.test, "--method", "random", "--repeats", "1"});
    REQUIRE(one.code == 0);
    std::istringstream s1(one.out);
    std::getline(s1, header);
    while (std::getline(s1, row)) CHECK(row.find(",0,") != std::string::npos);

    CHECK(slads_cli({"eval", "--image", fx.test}).code == cli::kExitUsage);
    CHECK(slads_cli({"eval", "--image", fx.test, "--method", "grid"}).code == cli::kExitUsage);
}

TEST_CASE("cli eval: label clashes get the model file stem") {
    Fixture fx("labels");
    REQUIRE(slads_cli(fx.quick_train(fx.path("first.slm"), "lsq")).code == 0);
    REQUIRE(slads_cli(fx.quick_train(fx.path("second.slm"), "lsq")).code == 0);
    const auto r = slads_cli({"eval", "--image", fx.test, "--model", fx.path("first.slm"), fx.path("second.slm"),
                              "--repeats", "1", "--budget", "0.1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\nlsq,") != std::string::npos);
    CHECK(r.out.find("\nlsq@second,") != std::string::npos);
}

TEST_CASE("evaluate: population std and failure reporting") {
    const std::vector<GroundTruthImage> images{synth::grains(Dims{16, 16}, 1)};
    cli::EvalOptions opt;
    opt.repeats = 4;
    opt.config.budget_density = 0.3;
    const auto outcome = cli::evaluate(images, {{"random", std::nullopt}}, opt);
    REQUIRE(outcome.failures.empty());
    CHECK(outcome.report.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});
    REQUIRE(outcome.report.rows.size() == 3);
    CHECK(outcome.report.rows.back().density == 0.3);

    // recompute the last row from independent runs
    std::vector<double> ps;
    for (std::uint64_t s = 0; s < 4; ++s) {
        RunConfig cfg = opt.config;
        cfg.seed = s;
        cfg.checkpoint_densities = cli::report_densities(cfg);
        SimulatedSource source(images[0], 0.0, derive_seed(s, 0x534f5552));
        ps.push_back(*run_random_baseline(source, cfg, &images[0]).checkpoints.back().psnr);
    }
    double mean = 0.0;
    for (double p : ps) mean += p / 4.0;
    double var = 0.0;
    for (double p : ps) var += (p - mean) * (p - mean) / 4.0;
    CHECK(outcome.report.rows.back().psnr_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(outcome.report.rows.back().psnr_std == doctest::Approx(std::sqrt(var)).epsilon(1e-9));

    // a model whose input width does not match fails every run; its rows become NaN
    ErdModel broken;
    broken.kind = RegressorKind::lsq;
    broken.payload = LinearModel{Eigen::VectorXd::Zero(3)};
    broken.stats.stddevs.fill(1.0);
    opt.repeats = 1;
    const auto bad = cli::evaluate(images, {{"random", std::nullopt}, {"broken", broken}}, opt);
    CHECK_FALSE(bad.failures.empty());
    CHECK(std::isfinite(bad.report.rows.front().psnr_mean));
    CHECK(std::isnan(bad.report.rows.back().psnr_mean));

    CHECK(cli::report_densities(opt.config) == std::vector<double>{0.1, 0.2, 0.3});
    RunConfig odd;
    odd.budget_density = 0.15;
    CHECK(cli::report_densities(odd) == std::vector<double>{0.1, 0.15});
}

TEST_CASE("cli pretrain: bundled image lookup and usable model") {
    Fixture fx("pretrain");
    const auto missing = slads_cli({"pretrain", "--bundle-dir", fx.path("nowhere"), "--out", fx.path("p.slm")});
    CHECK(missing.code == cli::kExitIo);
    CHECK(missing.err.find("--image") != std::string::npos);
    CHECK(missing.err.find("synth") != std::string::npos);

    fs::create_directories(fx.path("bundle"));
    REQUIRE(slads_cli({"synth", "--family", "generic", "--size", "32", "--out", fx.path("bundle/generic.pgm")})
                .code == 0);
    const auto r = slads_cli({"pretrain", "--bundle-dir", fx.path("bundle"), "--out", fx.path("p.slm"),
                              "--samples-per-level", "20", "--epochs", "3", "--hidden", "8"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const ErdModel m = load_model(fx.path("p.slm"));
    CHECK(m.metadata["pretrained"] == true);
    CHECK(m.metadata["image_sha256"] == m.metadata["images"][0]["sha256"]);
    CHECK(slads_cli({"run", "--model", fx.path("p.slm"), "--image", fx.test, "--out", fx.path("pr"), "--budget",
                     "0.2"})
              .code == 0);
    CHECK(slads_cli({"eval", "--image", fx.test, "--model", fx.path("p.slm"), "--repeats", "1", "--budget", "0.1"})
              .code == 0);
}

TEST_CASE("cli: config file values apply and explicit flags win") {
    Fixture fx("config");
    write_text(fx.path("run.ini"), "budget=0.2\ncheckpoints=[0.1,0.2]\nseed=9\nmethod=random\n");
    REQUIRE(slads_cli({"run", "--config", fx.path("run.ini"), "--image", fx.test, "--out", fx.path("c1")}).code == 0);
    CHECK(fs::exists(fx.path("c1") + "/mask_20.pgm"));
    CHECK_FALSE(fs::exists(fx.path("c1") + "/mask_30.pgm"));

    REQUIRE(slads_cli({"run", "--config", fx.path("run.ini"), "--budget", "0.3", "--image", fx.test, "--out",
                       fx.path("c2")})
                .code == 0);
    CHECK(fs::exists(fx.path("c2") + "/mask_30.pgm"));

    // same seed from file or flag gives the same history
    REQUIRE(slads_cli({"run", "--method", "random", "--seed", "9", "--budget", "0.2", "--checkpoints", "0.1,0.2",
                       "--image", fx.test, "--out", fx.path("c3")})
                .code == 0);
    CHECK(slurp(fx.path("c1") + "/history.csv") == slurp(fx.path("c3") + "/history.csv"));

    CHECK(slads_cli({"run", "--config", fx.path("absent.ini"), "--image", fx.test, "--out", fx.path("c4")}).code ==
          cli::kExitUsage);
}

TEST_CASE("cli synth: writes the requested family") {
    Fixture fx("synth");
    for (const auto& family : synth::family_names()) {
        const auto out = fx.path(family + ".pgm");
        REQUIRE(slads_cli({"synth", "--family", family, "--size", "20", "--seed", "2", "--out", out}).code == 0);
        const auto img = load_image(out);
        CHECK(img.dims() == Dims{20, 20});
        CHECK(quantize(img) == quantize(synth::generate(family, Dims{20, 20}, 2)));
    }
}
