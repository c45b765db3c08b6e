#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"

using namespace partscape;
using partscape::testing::scratch_dir;

namespace {

RunConfig small_config(const std::string& out) {
    RunConfig cfg;
    cfg.synthetic = "2d5c";
    cfg.s = 5;
    cfg.t0 = 20;
    cfg.m = 60;
    cfg.k = 4;
    cfg.seed = 3;
    cfg.bins = 10;
    cfg.out = out;
    return cfg;
}

}  // namespace

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RunConfig, HashIgnoresKeyOrderOutputAndThreads) {
    const auto dir = scratch_dir("config");
    detail::write_text(dir + "/a.cfg", "# run\ns = 4\nk=3\nsynthetic = 2d5c\nseed=9\n");
    detail::write_text(dir + "/b.cfg", "seed = 9   # same run\nsynthetic=2d5c\nk = 3\n\ns=4\nthreads=2\nout=/tmp/x\n");
    RunConfig a, b;
    for (const auto& [k, v] : RunConfig::parse_file(dir + "/a.cfg")) a.set(k, v);
    for (const auto& [k, v] : RunConfig::parse_file(dir + "/b.cfg")) b.set(k, v);
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    b.set("seed", "10");
    EXPECT_NE(a.hash(), b.hash());
}

TEST(RunConfig, RejectsBadValues) {
    RunConfig c;
    EXPECT_THROW(c.set("colour", "red"), ParameterError);
    EXPECT_THROW(c.set("m", "-3"), ParameterError);
    EXPECT_THROW(c.set("m", "2.5"), ParameterError);
    EXPECT_THROW(c.set("seed", "x"), ParameterError);
    EXPECT_THROW(c.validate(), ParameterError);  // no dataset
    c.synthetic = "2d5c";
    EXPECT_NO_THROW(c.validate());
    c.distance = "emd";
    EXPECT_THROW(c.validate(), ParameterError);
    c.distance = "density(liftemd)";
    c.sigma = "-1";
    EXPECT_THROW(c.validate(), ParameterError);
    c.sigma = "0.5";
    c.first = "4000";
    EXPECT_THROW(c.validate(), ParameterError);
    c.first = "12";
    EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, EveryKeyIsSettable) {
    RunConfig c;
    for (const auto& [key, help] : RunConfig::keys()) {
        EXPECT_FALSE(help.empty());
        const std::string value = key == "csv" || key == "synthetic" || key == "out" || key == "distance" ||
                                          key == "quality" || key == "sigma" || key == "first"
                                      ? std::string(key == "quality" ? "kernel" : "x")
                                      : std::string("1");
        EXPECT_NO_THROW(c.set(key, value)) << key;
    }
}

TEST(Seeds, ChildStreamsDiffer) {
    EXPECT_NE(kmeans_stream_seed(1), bandwidth_stream_seed(1));
    EXPECT_NE(chain_stream_seed(1, 0), chain_stream_seed(1, 1));
    EXPECT_EQ(chain_stream_seed(5, 2), chain_stream_seed(5, 2));
}

TEST(Samples, ChainsSplitTheSampleCount) {
    const auto data = generate_2d5c(2);
    SampleParams p;
    p.t0 = 2;
    p.m = 11;
    p.chains = 3;
    p.seed = 4;
    const auto z = generate_samples(data.points, p);
    EXPECT_EQ(z.size(), 11u);
    EXPECT_EQ(z.seed, 4u);
    p.chains = 12;
    EXPECT_THROW(generate_samples(data.points, p), ParameterError);
}

TEST(Pipeline, WritesEveryArtifactAndListsItInTheManifest) {
    const auto out = scratch_dir("pipeline");
    const auto cfg = small_config(out);
    const auto r = run_pipeline(cfg);
    EXPECT_EQ(std::filesystem::path(r.directory).filename().string(), cfg.hash());
    const std::string manifest = read_file(r.directory + "/manifest.txt");
    EXPECT_NE(manifest.find("status ok"), std::string::npos);
    std::size_t listed = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(r.directory)) {
        if (!entry.is_regular_file() || entry.path().filename() == "manifest.txt") continue;
        const auto rel = std::filesystem::relative(entry.path(), r.directory).generic_string();
        EXPECT_NE(manifest.find("file " + rel + " sha256 " + sha256_hex(read_file(entry.path().string()))),
                  std::string::npos)
            << rel;
        ++listed;
    }
    EXPECT_EQ(listed, 12u);

    const auto g = read_grouping(r.directory + "/grouping.txt");
    const auto z = read_samples(r.directory + "/samples.txt");
    EXPECT_EQ(g.representatives.size(), 4u);
    EXPECT_EQ(g.representatives.front(), best_quality_index(z.qualities));
}

TEST(Pipeline, RerunReproducesManifest) {
    const auto cfg = small_config(scratch_dir("pipeline_a"));
    auto other = cfg;
    other.out = scratch_dir("pipeline_b");
    other.threads = 3;
    EXPECT_EQ(run_pipeline(cfg).manifest_hash, run_pipeline(other).manifest_hash);
}

TEST(Pipeline, KmeansQualityAndDensityDistance) {
    auto cfg = small_config(scratch_dir("pipeline_variants"));
    cfg.quality = "kmeans";
    cfg.distance = "density(vi)";
    cfg.sigma = "2.5";
    cfg.chains = 2;
    cfg.first = "7";
    const auto r = run_pipeline(cfg);
    EXPECT_EQ(read_grouping(r.directory + "/grouping.txt").representatives.front(), 7u);
    EXPECT_EQ(read_distance_matrix(r.directory + "/distances.csv").kind(), "density(vi)");
}

TEST(Pipeline, StageFailureIsRecorded) {
    auto cfg = small_config(scratch_dir("pipeline_fail"));
    cfg.synthetic.clear();
    cfg.csv = cfg.out + "/missing.csv";
    try {
        run_pipeline(cfg);
        FAIL() << "expected an I/O error";
    } catch (const IoError& e) {
        EXPECT_EQ(e.stage(), "synth");
    }
    const std::string manifest = read_file(cfg.out + "/" + cfg.hash() + "/manifest.txt");
    EXPECT_NE(manifest.find("status failed stage=synth"), std::string::npos);
}

TEST(Pipeline, IrisSmokeRun) {
    RunConfig cfg;
    cfg.csv = PARTSCAPE_TEST_DATA "/iris.csv";
    cfg.label_col = 4;
    cfg.s = 3;
    cfg.k = 5;
    cfg.t0 = 10;
    cfg.m = 40;
    cfg.out = scratch_dir("pipeline_iris");
    const auto r = run_pipeline(cfg);
    const auto z = read_samples(r.directory + "/samples.txt");
    for (const auto& p : z.partitions) {
        EXPECT_EQ(p.size(), 150u);
        EXPECT_EQ(p.clusters(), 3u);
    }
}
