#include <doctest.h>

#include <cmath>
#include <regex>
#include <string>
#include <vector>

#include "cogscope/report.hpp"

using namespace cogscope;

namespace {

MetaResult sample_meta(std::vector<PooledStudyEffect>& studies) {
    studies.clear();
    auto add = [&](const char* id, double z, double var) {
        PooledStudyEffect s;
        s.dataset_id = id;
        s.variable = "time";
        s.z = z;
        s.var_z = var;
        s.n = 20;
        s.p_value = 0.04;
        studies.push_back(s);
    };
    add("alpha", 0.61, 0.05);
    add("beta", 0.34, 0.03);
    add("gamma", -0.05, 0.08);
    return random_effects(studies);
}

// Minimal XML well-formedness: tag stack balance and attribute quoting.
bool xml_well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    if (xml.rfind("<?xml", 0) != 0) return false;
    while ((i = xml.find('<', i)) != std::string::npos) {
        std::size_t end = xml.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = xml.substr(i + 1, end - i - 1);
        if (!tag.empty() && tag[0] == '?') {
            i = end + 1;
            continue;
        }
        if (!tag.empty() && tag[0] == '/') {
            if (stack.empty()) return false;
            std::string name = tag.substr(1);
            if (stack.back() != name) return false;
            stack.pop_back();
        } else if (!tag.empty() && tag.back() == '/') {
            // self-closing
        } else {
            std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            stack.push_back(name);
        }
        i = end + 1;
    }
    return stack.empty();
}

} // namespace

TEST_CASE("format_real renders 6 decimals and normalizes negative zero") {
    CHECK(format_real(0.0) == "0.000000");
    CHECK(format_real(-0.0) == "0.000000");
    CHECK(format_real(-1e-9) == "0.000000");
    CHECK(format_real(0.5) == "0.500000");
    CHECK(format_real(-0.291) == "-0.291000");
    CHECK(format_real(1.0 / 3.0) == "0.333333");
}

TEST_CASE("metrics csv has one row per method with LF endings") {
    ComplexityReport report;
    report.file = "a.java";
    MethodMetrics m;
    m.method = "A.m";
    m.cognitive = 3;
    m.cyclomatic = 2;
    m.loc = 7;
    report.methods.push_back(m);
    std::string csv = metrics_to_csv({report});
    CHECK(csv == "path,method,cognitive,cyclomatic,loc\na.java,A.m,3,2,7\n");
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("effects csv round trips through the reader") {
    EffectExport e;
    e.correlation.dataset_id = "ds1";
    e.correlation.variable = "time";
    e.correlation.method = CorrelationMethod::Kendall;
    e.correlation.coefficient = 0.412345;
    e.correlation.n = 20;
    e.correlation.p_value = 0.012345;
    e.effect.dataset_id = "ds1";
    e.effect.variable = "time";
    e.effect.r = 0.598765;
    e.effect.z = 0.690123;
    e.effect.var_z = 1.0 / 17.0;
    e.effect.n = 20;

    std::string csv = effects_to_csv({e});
    CHECK(csv.find("dataset_id,variable,method,coefficient,n,r,z,var_z,p_value\n") == 0);
    auto parsed = effects_from_csv(csv, "mem");
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].correlation.dataset_id == "ds1");
    CHECK(parsed[0].correlation.method == CorrelationMethod::Kendall);
    CHECK(parsed[0].correlation.n == 20);
    CHECK(parsed[0].effect.r == doctest::Approx(0.598765));
    CHECK(parsed[0].effect.var_z == doctest::Approx(1.0 / 17.0).epsilon(1e-6));
}

TEST_CASE("meta csv columns match the export schema") {
    std::vector<PooledStudyEffect> studies;
    MetaResult meta = sample_meta(studies);
    std::string csv = meta_to_csv({meta});
    CHECK(csv.find("variable,k,summary_r,ci_low,ci_high,tau2,Q,I2,interpretation\n") == 0);
    CHECK(csv.find("time,3,") != std::string::npos);
}

TEST_CASE("forest spec rows are sorted and carry weights") {
    std::vector<PooledStudyEffect> studies;
    MetaResult meta = sample_meta(studies);
    std::reverse(studies.begin(), studies.end());
    auto spec = make_forest_spec(meta, studies);
    REQUIRE(spec.rows.size() == 3);
    CHECK(spec.rows[0].label == "alpha");
    CHECK(spec.rows[1].label == "beta");
    CHECK(spec.rows[2].label == "gamma");
    double total = 0.0;
    for (const auto& row : spec.rows) total += row.weight_percent;
    CHECK(total == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("ascii and svg plots encode identical numbers") {
    std::vector<PooledStudyEffect> studies;
    MetaResult meta = sample_meta(studies);
    auto spec = make_forest_spec(meta, studies);

    std::string ascii = render_forest_ascii(spec);
    std::string svg = render_forest_svg(spec);

    for (const auto& row : spec.rows) {
        for (const std::string& value : {format_real(row.r), format_real(row.ci_low),
                                         format_real(row.ci_high),
                                         format_real(row.weight_percent),
                                         format_real(row.p_value)})
            CHECK(ascii.find(value) != std::string::npos);
        std::string attrs = "data-r=\"" + format_real(row.r) + "\" data-low=\"" +
                            format_real(row.ci_low) + "\" data-high=\"" +
                            format_real(row.ci_high) + "\"";
        CHECK(svg.find(attrs) != std::string::npos);
    }
    CHECK(ascii.find(format_real(spec.summary_r)) != std::string::npos);
    CHECK(svg.find("data-r=\"" + format_real(spec.summary_r) + "\"") != std::string::npos);
}

TEST_CASE("svg output is well-formed xml with squares and a diamond") {
    std::vector<PooledStudyEffect> studies;
    MetaResult meta = sample_meta(studies);
    auto spec = make_forest_spec(meta, studies);
    std::string svg = render_forest_svg(spec);
    CHECK(xml_well_formed(svg));
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);

    std::regex rect_re("<rect[^>]*fill=\"#2a4d8f\"");
    auto begin = std::sregex_iterator(svg.begin(), svg.end(), rect_re);
    CHECK(std::distance(begin, std::sregex_iterator()) == 3); // one square per study
    CHECK(svg.find("<polygon") != std::string::npos);         // summary diamond
}

TEST_CASE("identical effects center the diamond on the common value") {
    std::vector<PooledStudyEffect> studies;
    for (const char* id : {"a", "b", "c"}) {
        PooledStudyEffect s;
        s.dataset_id = id;
        s.variable = "time";
        s.z = 0.5;
        s.var_z = 0.04;
        s.n = 15;
        studies.push_back(s);
    }
    auto meta = random_effects(studies);
    auto spec = make_forest_spec(meta, studies);
    CHECK(spec.summary_r == doctest::Approx(std::tanh(0.5)).epsilon(1e-9));
    std::string ascii = render_forest_ascii(spec);
    CHECK(ascii.find('@') != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    std::vector<PooledStudyEffect> studies;
    MetaResult meta = sample_meta(studies);
    auto spec = make_forest_spec(meta, studies);
    CHECK(render_forest_svg(spec) == render_forest_svg(spec));
    CHECK(render_forest_ascii(spec) == render_forest_ascii(spec));
    CHECK(meta_to_csv({meta}) == meta_to_csv({meta}));
}

TEST_CASE("pooled rows are labeled in the forest plot") {
    std::vector<PooledStudyEffect> studies;
    PooledStudyEffect s;
    s.dataset_id = "multi";
    s.variable = "time";
    s.z = 0.4;
    s.var_z = 0.05;
    s.n = 30;
    s.members = {"outcome-1", "outcome-2"};
    studies.push_back(s);
    PooledStudyEffect t;
    t.dataset_id = "single";
    t.variable = "time";
    t.z = 0.2;
    t.var_z = 0.04;
    t.n = 12;
    studies.push_back(t);
    auto meta = random_effects(studies);
    auto spec = make_forest_spec(meta, studies);
    CHECK(spec.rows[0].label == "multi (pooled)");
    CHECK(spec.rows[1].label == "single");
}
