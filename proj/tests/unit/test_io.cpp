#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "eirnet/io/artifacts.hpp"
#include "eirnet/io/params_io.hpp"
#include "eirnet/validation.hpp"
#include "fixtures.hpp"

using namespace eirnet;
using namespace eirnet::io;

namespace {

const std::string config_dir = EIRNET_CONFIG_DIR;

std::filesystem::path scratch_dir(const std::string& name)
{
    auto d = std::filesystem::temp_directory_path() / ("eirnet_test_io_" + name);
    std::filesystem::remove_all(d);
    return d;
}

} // namespace

TEST(ParamsIo, ShippedTomlMatchesTheBuiltInConfiguration)
{
    const ModelParams p = load_params(config_dir + "/n2-valid.toml");
    EXPECT_EQ(params_hash(p), params_hash(fixtures::n2_params()));
    EXPECT_TRUE(validate_params(p).all_passed());
}

TEST(ParamsIo, TomlAndJsonTwinsHashEqual)
{
    const ModelParams a = load_params(config_dir + "/n2-valid.toml");
    const ModelParams b = load_params(config_dir + "/n2-valid.json");
    EXPECT_EQ(params_hash(a), params_hash(b));
}

TEST(ParamsIo, JsonRoundTripIsLossless)
{
    const ModelParams p = fixtures::n2_params();
    const json doc = params_to_json(p);
    const ModelParams q = params_from_json(parse_document(doc.dump(), false));
    EXPECT_EQ(params_to_json(q), doc);
    EXPECT_EQ(q.rotations[1].lift(0.3), p.rotations[1].lift(0.3));
    EXPECT_EQ(q.anosov.lambda, p.anosov.lambda);
}

TEST(ParamsIo, TabulatedAndProjectiveFibersRoundTrip)
{
    ModelParams p = fixtures::n2_params();
    p.fibers[0] = NSFlowSpec::projective(3.0, 0.01, 0.2);
    p.fibers[1] = NSFlowSpec::tabulated({0.0, -1.0, 0.0, 1.0}, 0.05, 0.2, 0.4);
    const ModelParams q = params_from_json(params_to_json(p));
    EXPECT_EQ(q.fibers[0].kind, FlowKind::projective);
    EXPECT_EQ(q.fibers[0].alpha, 3.0);
    EXPECT_EQ(q.fibers[1].table.samples(), p.fibers[1].table.samples());
    EXPECT_EQ(q.fibers[1].contraction_c, 0.4);
}

TEST(ParamsIo, FormatDetection)
{
    EXPECT_TRUE(looks_like_toml("a.toml", "{"));
    EXPECT_FALSE(looks_like_toml("a.json", "x = 1"));
    EXPECT_FALSE(looks_like_toml("a.cfg", "  \n{\"schema\": 1}"));
    EXPECT_TRUE(looks_like_toml("a.cfg", "schema = 1"));
}

TEST(ParamsIo, MalformedDocumentsRaiseParseError)
{
    EXPECT_THROW(load_params(config_dir + "/malformed.toml"), ParseError);
    EXPECT_THROW(load_params(config_dir + "/does-not-exist.toml"), ParseError);
    EXPECT_THROW(parse_document("{\"schema\": ", false), ParseError);

    json doc = params_to_json(fixtures::n2_params());
    doc["schema"] = "ei-params/0";
    EXPECT_THROW(params_from_json(doc), ParseError);
    doc = params_to_json(fixtures::n2_params());
    doc.erase("b");
    EXPECT_THROW(params_from_json(doc), ParseError);
    doc = params_to_json(fixtures::n2_params());
    doc["b"] = "half";
    EXPECT_THROW(params_from_json(doc), ParseError);
    doc = params_to_json(fixtures::n2_params());
    doc["fibers"][0]["kind"] = "spiral";
    EXPECT_THROW(params_from_json(doc), ParseError);
    doc = params_to_json(fixtures::n2_params());
    doc["rotations"].erase(1);
    EXPECT_THROW(params_from_json(doc), ParseError);
}

TEST(ParamsIo, DomainErrorsKeepTheirType)
{
    json doc = params_to_json(fixtures::n2_params());
    doc["anosov"]["matrix"] = {{1, 1}, {0, 1}};
    EXPECT_THROW(params_from_json(doc), NotHyperbolic);
    doc = params_to_json(fixtures::n2_params());
    doc["rotations"][0]["epsilon"] = 0.4;
    doc["rotations"][0]["kappa"] = 3;
    EXPECT_THROW(params_from_json(doc), InfeasibleGeometry);
}

TEST(ParamsIo, InvalidPhiLoadsButFailsValidation)
{
    const ModelParams p = load_params(config_dir + "/invalid-phi.toml");
    const ValidationReport rep = validate_params(p);
    EXPECT_FALSE(rep.all_passed());
    EXPECT_NE(rep.find("phi")->reason.find("Φ<1 violated"), std::string::npos);
}

TEST(Artifacts, Sha256KnownAnswer)
{
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Artifacts, NumberFormattingRoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 2.5e-13, -7.0, 1.3169578969248166}) {
        const std::string s = fmt(v);
        EXPECT_EQ(std::stod(s), v) << s;
    }
    EXPECT_EQ(fmt(0.1), "0.1");
}

TEST(Artifacts, CsvRowsMustBeComplete)
{
    CsvTable t({"a", "b"});
    t.cell(1.5).cell(std::size_t{2});
    t.end_row();
    EXPECT_EQ(t.str(), "a,b\n1.5,2\n");
    EXPECT_EQ(t.rows(), 1u);
    t.cell(std::string("x"));
    EXPECT_THROW(t.end_row(), Error);
}

TEST(Artifacts, UncommittedRunsLeaveNoFiles)
{
    const auto dir = scratch_dir("uncommitted");
    {
        RunArtifacts run(dir);
        run.write("a.csv", std::string("x\n1\n"));
        EXPECT_TRUE(std::filesystem::exists(dir / "a.csv"));
    }
    EXPECT_FALSE(std::filesystem::exists(dir / "a.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Artifacts, ManifestListsFilesWithChecksums)
{
    const auto dir = scratch_dir("committed");
    json m;
    {
        RunArtifacts run(dir);
        run.write("a.csv", std::string("abc"));
        run.write("b.json", json{{"k", 1}});
        m = run.commit({{"command", "test"}});
    }
    EXPECT_TRUE(std::filesystem::exists(dir / "a.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
    EXPECT_EQ(m["schema"], "ei-run/1");
    ASSERT_EQ(m["files"].size(), 2u);
    EXPECT_EQ(m["files"][0]["sha256"], sha256_hex("abc"));
    EXPECT_EQ(m["files"][0]["bytes"], 3);
    const json back = json::parse(read_file((dir / "manifest.json").string()));
    EXPECT_EQ(back, m);
    std::filesystem::remove_all(dir);
}

TEST(Artifacts, ValidationReportSerialises)
{
    const json j = report_to_json(validate_params(fixtures::n2_params()));
    EXPECT_TRUE(j["all_passed"].get<bool>());
    EXPECT_FALSE(j["checks"].empty());
    EXPECT_EQ(j["d_computed"].size(), 2u);
}
