#include "cogscope/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace cogscope {

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::string s = buf;
    if (s == "-0.000000") return "0.000000";
    return s;
}

std::string metrics_to_csv(const std::vector<ComplexityReport>& reports) {
    std::string out = "path,method,cognitive,cyclomatic,loc\n";
    for (const auto& report : reports) {
        for (const auto& m : report.methods) {
            out += report.file;
            out += ',';
            out += m.method;
            out += ',';
            out += std::to_string(m.cognitive);
            out += ',';
            out += std::to_string(m.cyclomatic);
            out += ',';
            out += std::to_string(m.loc);
            out += '\n';
        }
    }
    return out;
}

std::string metrics_to_json(const std::vector<ComplexityReport>& reports) {
    auto files = nlohmann::ordered_json::array();
    for (const auto& report : reports) {
        nlohmann::ordered_json jf;
        jf["file"] = report.file;
        jf["tolerant"] = report.tolerant;
        auto methods = nlohmann::ordered_json::array();
        for (const auto& m : report.methods) {
            nlohmann::ordered_json jm;
            jm["name"] = m.method;
            jm["signature"] = m.signature;
            jm["cognitive"] = m.cognitive;
            jm["cyclomatic"] = m.cyclomatic;
            jm["loc"] = m.loc;
            jm["span"] = {{"begin_line", m.span.begin_line},
                          {"begin_column", m.span.begin_column},
                          {"end_line", m.span.end_line},
                          {"end_column", m.span.end_column}};
            auto incs = nlohmann::ordered_json::array();
            for (const auto& inc : m.increments) {
                incs.push_back({{"kind", construct_kind_name(inc.kind)},
                                {"line", inc.span.begin_line},
                                {"column", inc.span.begin_column},
                                {"base", inc.base},
                                {"nesting_penalty", inc.nesting_penalty},
                                {"total", inc.total}});
            }
            jm["increments"] = std::move(incs);
            methods.push_back(std::move(jm));
        }
        jf["methods"] = std::move(methods);
        jf["totals"] = {{"cognitive", report.file_cognitive_total},
                        {"max_method_cognitive", report.file_max_method_cognitive}};
        files.push_back(std::move(jf));
    }
    nlohmann::ordered_json root;
    root["files"] = std::move(files);
    return root.dump(2) + "\n";
}

std::string effects_to_csv(const std::vector<EffectExport>& effects) {
    std::string out = "dataset_id,variable,method,coefficient,n,r,z,var_z,p_value\n";
    for (const auto& e : effects) {
        out += e.correlation.dataset_id;
        out += ',';
        out += e.correlation.variable;
        out += ',';
        out += correlation_method_name(e.correlation.method);
        out += ',';
        out += format_real(e.correlation.coefficient);
        out += ',';
        out += std::to_string(e.correlation.n);
        out += ',';
        out += format_real(e.effect.r);
        out += ',';
        out += format_real(e.effect.z);
        out += ',';
        out += format_real(e.effect.var_z);
        out += ',';
        out += format_real(e.correlation.p_value);
        out += '\n';
    }
    return out;
}

std::vector<EffectExport> effects_from_csv(const std::string& csv_text,
                                           const std::string& source_label) {
    std::vector<EffectExport> effects;
    std::istringstream stream(csv_text);
    std::string line;
    if (!std::getline(stream, line))
        throw Error(ErrorCode::SchemaError, source_label + ": empty effects file");
    if (line.ends_with("\r")) line.pop_back();
    if (line != "dataset_id,variable,method,coefficient,n,r,z,var_z,p_value")
        throw Error(ErrorCode::SchemaError, source_label + ": unexpected effects header");
    int line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (f.size() != 9)
            throw Error(ErrorCode::SchemaError, source_label + ": row " +
                                                std::to_string(line_no) + " has " +
                                                std::to_string(f.size()) + " fields");
        EffectExport e;
        e.correlation.dataset_id = f[0];
        e.correlation.variable = f[1];
        e.correlation.method =
            f[2] == "kendall" ? CorrelationMethod::Kendall : CorrelationMethod::Pearson;
        try {
            e.correlation.coefficient = std::stod(f[3]);
            e.correlation.n = std::stoi(f[4]);
            e.effect.r = std::stod(f[5]);
            e.effect.z = std::stod(f[6]);
            e.effect.var_z = std::stod(f[7]);
            e.correlation.p_value = std::stod(f[8]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ValueError, source_label + ": row " + std::to_string(line_no) +
                                               " has a non-numeric field");
        }
        e.correlation.expected = expected_direction(f[1]);
        e.effect.dataset_id = f[0];
        e.effect.variable = f[1];
        e.effect.n = e.correlation.n;
        e.effect.converted_from_kendall = e.correlation.method == CorrelationMethod::Kendall;
        effects.push_back(std::move(e));
    }
    return effects;
}

std::string meta_to_csv(const std::vector<MetaResult>& results) {
    std::string out = "variable,k,summary_r,ci_low,ci_high,tau2,Q,I2,interpretation\n";
    for (const auto& r : results) {
        out += r.variable;
        out += ',';
        out += std::to_string(r.k);
        out += ',';
        out += format_real(r.summary_r);
        out += ',';
        out += format_real(r.ci_low_r);
        out += ',';
        out += format_real(r.ci_high_r);
        out += ',';
        out += format_real(r.tau2);
        out += ',';
        out += format_real(r.q);
        out += ',';
        out += format_real(r.i2);
        out += ',';
        out += interpretation_name(r.interpretation);
        out += '\n';
    }
    return out;
}

ForestPlotSpec make_forest_spec(const MetaResult& meta,
                                const std::vector<PooledStudyEffect>& studies) {
    std::vector<PooledStudyEffect> sorted(studies);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const PooledStudyEffect& a, const PooledStudyEffect& b) {
                         return a.dataset_id < b.dataset_id;
                     });
    const double z975 = 1.959963984540054;

    ForestPlotSpec spec;
    spec.title = meta.variable;
    spec.summary_r = meta.summary_r;
    spec.summary_ci_low = meta.ci_low_r;
    spec.summary_ci_high = meta.ci_high_r;
    spec.interpretation = interpretation_name(meta.interpretation);
    for (const auto& study : sorted) {
        ForestRow row;
        row.pooled = study.members.size() > 1;
        row.label = study.dataset_id + (row.pooled ? " (pooled)" : "");
        double se = std::sqrt(study.var_z);
        row.r = std::tanh(study.z);
        row.ci_low = std::tanh(study.z - z975 * se);
        row.ci_high = std::tanh(study.z + z975 * se);
        row.p_value = study.p_value;
        row.n = study.n;
        for (const auto& w : meta.weights)
            if (w.dataset_id == study.dataset_id) row.weight_percent = w.weight * 100.0;
        spec.rows.push_back(std::move(row));
    }
    return spec;
}

namespace {

constexpr int kAxisCols = 61; // odd so that r = 0 sits on a column

int axis_col(double r) {
    double clamped = std::clamp(r, -1.0, 1.0);
    return static_cast<int>(std::lround((clamped + 1.0) / 2.0 * (kAxisCols - 1)));
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string pad_left(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

} // namespace

std::string render_forest_ascii(const ForestPlotSpec& spec) {
    std::size_t label_width = 8;
    for (const auto& row : spec.rows) label_width = std::max(label_width, row.label.size());
    label_width = std::max(label_width, std::string("summary").size());

    std::ostringstream out;
    out << "forest: " << spec.title << "\n";
    out << pad_right("study", label_width) << "  ";
    out << "-1" << std::string(13, ' ') << "-0.5" << std::string(11, ' ') << "0"
        << std::string(12, ' ') << "+0.5" << std::string(12, ' ') << "+1";
    out << "  " << pad_left("r", 9) << "  [" << pad_left("low", 9) << ", " << pad_left("high", 9)
        << "]  " << pad_left("weight%", 9) << "  " << pad_left("p", 9) << "\n";

    auto bar = [](double r, double lo, double hi, char marker) {
        std::string axis(kAxisCols, ' ');
        axis[axis_col(0.0)] = '|';
        int c_lo = axis_col(lo), c_hi = axis_col(hi), c_r = axis_col(r);
        for (int i = c_lo; i <= c_hi; ++i) axis[static_cast<std::size_t>(i)] = '-';
        axis[static_cast<std::size_t>(c_lo)] = '[';
        axis[static_cast<std::size_t>(c_hi)] = ']';
        axis[static_cast<std::size_t>(c_r)] = marker;
        return axis;
    };

    for (const auto& row : spec.rows) {
        out << pad_right(row.label, label_width) << "  "
            << bar(row.r, row.ci_low, row.ci_high, '*') << "  "
            << pad_left(format_real(row.r), 9) << "  [" << pad_left(format_real(row.ci_low), 9)
            << ", " << pad_left(format_real(row.ci_high), 9) << "]  "
            << pad_left(format_real(row.weight_percent), 9) << "  "
            << pad_left(format_real(row.p_value), 9) << "\n";
    }
    if (spec.has_summary) {
        std::string axis(kAxisCols, ' ');
        axis[axis_col(0.0)] = '|';
        int c_lo = axis_col(spec.summary_ci_low), c_hi = axis_col(spec.summary_ci_high);
        int c_r = axis_col(spec.summary_r);
        for (int i = c_lo; i <= c_hi; ++i) axis[static_cast<std::size_t>(i)] = '=';
        axis[static_cast<std::size_t>(c_lo)] = '<';
        axis[static_cast<std::size_t>(c_hi)] = '>';
        axis[static_cast<std::size_t>(c_r)] = '@';
        out << pad_right("summary", label_width) << "  " << axis << "  "
            << pad_left(format_real(spec.summary_r), 9) << "  ["
            << pad_left(format_real(spec.summary_ci_low), 9) << ", "
            << pad_left(format_real(spec.summary_ci_high), 9) << "]  "
            << pad_left("", 9) << "  " << pad_left(spec.interpretation, 9) << "\n";
    }
    return out.str();
}

std::string render_forest_svg(const ForestPlotSpec& spec) {
    const int width = 920;
    const int row_height = 26;
    const int top = 70;
    const int plot_x0 = 230;
    const int plot_x1 = 620;
    const int rows = static_cast<int>(spec.rows.size());
    const int height = top + row_height * (rows + (spec.has_summary ? 1 : 0)) + 60;

    auto x_of = [&](double r) {
        double clamped = std::clamp(r, -1.0, 1.0);
        return plot_x0 + (clamped + 1.0) / 2.0 * (plot_x1 - plot_x0);
    };
    auto fmt_coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    svg << "  <text x=\"20\" y=\"30\" font-family=\"monospace\" font-size=\"16\">forest: "
        << spec.title << "</text>\n";

    int axis_y = top + row_height * (rows + (spec.has_summary ? 1 : 0)) + 14;
    svg << "  <line x1=\"" << plot_x0 << "\" y1=\"" << axis_y << "\" x2=\"" << plot_x1
        << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
    for (double tick : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        double tx = x_of(tick);
        svg << "  <line x1=\"" << fmt_coord(tx) << "\" y1=\"" << axis_y << "\" x2=\""
            << fmt_coord(tx) << "\" y2=\"" << axis_y + 6 << "\" stroke=\"black\"/>\n";
        char label[16];
        std::snprintf(label, sizeof(label), "%g", tick);
        svg << "  <text x=\"" << fmt_coord(tx - 8) << "\" y=\"" << axis_y + 20
            << "\" font-family=\"monospace\" font-size=\"11\">" << label << "</text>\n";
    }
    svg << "  <line x1=\"" << fmt_coord(x_of(0.0)) << "\" y1=\"" << top - 10 << "\" x2=\""
        << fmt_coord(x_of(0.0)) << "\" y2=\"" << axis_y << "\" stroke=\"#888888\" "
        << "stroke-dasharray=\"4,4\"/>\n";

    svg << "  <text x=\"20\" y=\"" << top - 16
        << "\" font-family=\"monospace\" font-size=\"12\">study</text>\n";
    svg << "  <text x=\"640\" y=\"" << top - 16
        << "\" font-family=\"monospace\" font-size=\"12\">r [95% CI] weight% p</text>\n";

    int y = top;
    for (const auto& row : spec.rows) {
        int cy = y + row_height / 2;
        double side = std::min(16.0, 4.0 + row.weight_percent * 0.16);
        svg << "  <g class=\"study-row\" data-label=\"" << row.label << "\" data-r=\""
            << format_real(row.r) << "\" data-low=\"" << format_real(row.ci_low)
            << "\" data-high=\"" << format_real(row.ci_high) << "\" data-weight=\""
            << format_real(row.weight_percent) << "\" data-p=\"" << format_real(row.p_value)
            << "\">\n";
        svg << "    <text x=\"20\" y=\"" << cy + 4
            << "\" font-family=\"monospace\" font-size=\"12\">" << row.label << "</text>\n";
        svg << "    <line x1=\"" << fmt_coord(x_of(row.ci_low)) << "\" y1=\"" << cy << "\" x2=\""
            << fmt_coord(x_of(row.ci_high)) << "\" y2=\"" << cy << "\" stroke=\"black\"/>\n";
        svg << "    <rect x=\"" << fmt_coord(x_of(row.r) - side / 2.0) << "\" y=\""
            << fmt_coord(cy - side / 2.0) << "\" width=\"" << fmt_coord(side) << "\" height=\""
            << fmt_coord(side) << "\" fill=\"#2a4d8f\"/>\n";
        svg << "    <text x=\"640\" y=\"" << cy + 4
            << "\" font-family=\"monospace\" font-size=\"11\">" << format_real(row.r) << " ["
            << format_real(row.ci_low) << ", " << format_real(row.ci_high) << "] "
            << format_real(row.weight_percent) << " " << format_real(row.p_value) << "</text>\n";
        svg << "  </g>\n";
        y += row_height;
    }

    if (spec.has_summary) {
        int cy = y + row_height / 2;
        svg << "  <g class=\"summary-row\" data-r=\"" << format_real(spec.summary_r)
            << "\" data-low=\"" << format_real(spec.summary_ci_low) << "\" data-high=\""
            << format_real(spec.summary_ci_high) << "\">\n";
        svg << "    <text x=\"20\" y=\"" << cy + 4
            << "\" font-family=\"monospace\" font-size=\"12\">summary ("
            << spec.interpretation << ")</text>\n";
        svg << "    <polygon points=\"" << fmt_coord(x_of(spec.summary_ci_low)) << "," << cy << " "
            << fmt_coord(x_of(spec.summary_r)) << "," << cy - 8 << " "
            << fmt_coord(x_of(spec.summary_ci_high)) << "," << cy << " "
            << fmt_coord(x_of(spec.summary_r)) << "," << cy + 8 << "\" fill=\"#8f2a2a\"/>\n";
        svg << "    <text x=\"640\" y=\"" << cy + 4
            << "\" font-family=\"monospace\" font-size=\"11\">" << format_real(spec.summary_r)
            << " [" << format_real(spec.summary_ci_low) << ", "
            << format_real(spec.summary_ci_high) << "]</text>\n";
        svg << "  </g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace cogscope
