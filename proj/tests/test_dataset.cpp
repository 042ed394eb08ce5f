#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "roadinspect/dataset.hpp"
#include "roadinspect/metrics.hpp"

using namespace roadinspect;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::ofstream out(name);
    out << content;
    return name;
}

}  // namespace

TEST_CASE("csv load preserves order and validates rows", "[dataset]") {
    const std::string path = write_temp(
        "ds_ok.csv",
        "segment_id,d1,d2,d3,d4,d5,d6,d7,pci\n"
        "a,700,600,500,400,300,200,100,55.5\n"
        "b,650,550,450,350,250,150,50,60\n"
        "c,500,400,300,200,150,100,90,70.25\n");
    auto ds = load_csv(path);
    REQUIRE(ds.size() == 3);
    CHECK(ds.segments[0].id == "a");
    CHECK(ds.segments[1].id == "b");
    CHECK(ds.segments[2].id == "c");
    CHECK(ds.segments[0].deflections[0] == 700.0);
    CHECK(ds.segments[2].pci == 70.25);
    std::filesystem::remove(path);
}

TEST_CASE("csv schema and invariant violations", "[dataset]") {
    const std::string six = write_temp("ds_six.csv",
                                       "segment_id,d1,d2,d3,d4,d5,d6,pci\n"
                                       "a,1,2,3,4,5,6,50\n");
    try {
        load_csv(six);
        FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SchemaMismatch);
    }
    std::filesystem::remove(six);

    const std::string arity = write_temp("ds_arity.csv",
                                         "segment_id,d1,d2,d3,d4,d5,d6,d7,pci\n"
                                         "a,1,2,3,4,5,6,50\n");
    try {
        load_csv(arity);
        FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SchemaMismatch);
    }
    std::filesystem::remove(arity);

    const std::string range = write_temp("ds_range.csv",
                                         "segment_id,d1,d2,d3,d4,d5,d6,d7,pci\n"
                                         "a,1,2,3,4,5,6,7,120\n");
    try {
        load_csv(range);
        FAIL("expected InvariantViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvariantViolation);
    }
    std::filesystem::remove(range);

    const std::string garbled = write_temp("ds_parse.csv",
                                           "segment_id,d1,d2,d3,d4,d5,d6,d7,pci\n"
                                           "a,1,2,x,4,5,6,7,50\n");
    try {
        load_csv(garbled);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParseError);
    }
    std::filesystem::remove(garbled);

    const std::string dup = write_temp("ds_dup.csv",
                                       "segment_id,d1,d2,d3,d4,d5,d6,d7,pci\n"
                                       "a,1,2,3,4,5,6,7,50\n"
                                       "a,1,2,3,4,5,6,7,51\n");
    try {
        load_csv(dup);
        FAIL("expected InvariantViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvariantViolation);
    }
    std::filesystem::remove(dup);
}

TEST_CASE("csv write/load round trip", "[dataset]") {
    auto ds = synth_generate(40, 123);
    const std::string path = "ds_roundtrip.csv";
    write_csv(path, ds);
    auto back = load_csv(path);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.segments[i].id == ds.segments[i].id);
        CHECK(back.segments[i].pci == ds.segments[i].pci);  // to_chars round-trips exactly
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            CHECK(back.segments[i].deflections[k] == ds.segments[i].deflections[k]);
    }
    // writing the loaded dataset reproduces the file byte for byte
    const std::string path2 = "ds_roundtrip2.csv";
    write_csv(path2, back);
    std::ifstream f1(path), f2(path2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("split is a seeded deterministic partition", "[dataset]") {
    auto ds = synth_generate(10, 7);
    auto [tr1, te1] = split(ds, 0.2, 99);
    auto [tr2, te2] = split(ds, 0.2, 99);
    CHECK(tr1.size() == 8);
    CHECK(te1.size() == 2);
    REQUIRE(tr2.size() == tr1.size());
    for (std::size_t i = 0; i < tr1.size(); ++i)
        CHECK(tr1.segments[i].id == tr2.segments[i].id);
    for (std::size_t i = 0; i < te1.size(); ++i)
        CHECK(te1.segments[i].id == te2.segments[i].id);

    // disjoint and union-complete
    std::set<std::string> ids;
    for (const auto& s : tr1.segments) ids.insert(s.id);
    for (const auto& s : te1.segments) ids.insert(s.id);
    CHECK(ids.size() == 10);

    // parts keep original order
    auto index_of = [&](const std::string& id) {
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds.segments[i].id == id) return i;
        return ds.size();
    };
    for (std::size_t i = 1; i < tr1.size(); ++i)
        CHECK(index_of(tr1.segments[i - 1].id) < index_of(tr1.segments[i].id));
    for (std::size_t i = 1; i < te1.size(); ++i)
        CHECK(index_of(te1.segments[i - 1].id) < index_of(te1.segments[i].id));

    // different seeds generally differ
    bool any_diff = false;
    for (std::uint64_t seed = 0; seed < 10 && !any_diff; ++seed) {
        auto [tra, tea] = split(ds, 0.2, seed);
        if (tea.segments[0].id != te1.segments[0].id ||
            tea.segments[1].id != te1.segments[1].id)
            any_diff = true;
    }
    CHECK(any_diff);

    Dataset tiny;
    tiny.segments.push_back(ds.segments[0]);
    try {
        split(tiny, 0.2, 1);
        FAIL("expected TooFewSegments");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooFewSegments);
    }
}

TEST_CASE("scaler maps train range onto [-1, 1] and inverts exactly", "[dataset]") {
    auto ds = synth_generate(60, 5);
    auto sc = fit_scaler(ds);
    for (const auto& s : ds.segments) {
        auto z = sc.transform(s.deflections);
        for (double v : z) {
            CHECK(v >= -1.0 - 1e-12);
            CHECK(v <= 1.0 + 1e-12);
        }
        auto back = sc.inverse(z);
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            CHECK(back[k] == Catch::Approx(s.deflections[k]).margin(1e-12));
        CHECK(sc.unscale_target(sc.scale_target(s.pci)) ==
              Catch::Approx(s.pci).margin(1e-12));
    }
    // midpoint and endpoint behavior
    Scaler simple;
    simple.in_min.fill(0.0);
    simple.in_max.fill(100.0);
    simple.target_min = 0.0;
    simple.target_max = 100.0;
    std::array<double, 7> mid{};
    mid.fill(50.0);
    auto z = simple.transform(mid);
    for (double v : z) CHECK(v == Catch::Approx(0.0).margin(1e-15));
    CHECK(simple.scale_target(100.0) == 1.0);

    // constant feature
    Dataset flat = ds;
    for (auto& s : flat.segments) s.deflections[2] = 42.0;
    try {
        fit_scaler(flat);
        FAIL("expected DegenerateFeature");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegenerateFeature);
    }
}

TEST_CASE("synthetic generator determinism and basin shape", "[dataset]") {
    auto a = synth_generate(236, 4242);
    auto b = synth_generate(236, 4242);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.segments[i].pci == b.segments[i].pci);
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            CHECK(a.segments[i].deflections[k] == b.segments[i].deflections[k]);
    }
    CHECK(a.provenance.kind == Provenance::Kind::Synthetic);
    CHECK(a.provenance.seed == 4242);

    // monotone decaying basins over many samples
    auto big = synth_generate(10000, 999);
    for (const auto& s : big.segments) {
        for (std::size_t k = 0; k + 1 < kNumGeophones; ++k)
            CHECK(s.deflections[k] >= s.deflections[k + 1]);
        CHECK(s.deflections[6] >= 0.0);
        CHECK(s.pci >= 0.0);
        CHECK(s.pci <= 100.0);
    }

    // noiseless plant reproduces the generator function exactly
    SynthParams quiet;
    quiet.noise_sd = 0.0;
    auto clean = synth_generate(100, 31, quiet);
    for (const auto& s : clean.segments) {
        double g = quiet.intercept;
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            g += quiet.coef[k] * s.deflections[k];
        CHECK(s.pci == clamp(g, 0.0, 100.0));
    }

    try {
        synth_generate(0, 1);
        FAIL("expected InvalidParams");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidParams);
    }
}

TEST_CASE("synthetic data carries the planted correlation signs", "[dataset]") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto ds = synth_generate(2000, seed);
        auto impact = input_impact(ds);
        CHECK(impact[0] < 0.0);  // D1 inversely related
        CHECK(impact[6] > 0.0);  // D7 directly related
    }
}
