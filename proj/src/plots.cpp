#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "qdvqe/errors.hpp"
#include "qdvqe/experiment.hpp"

namespace qdvqe {
namespace {

constexpr double kFidelityThreshold = 0.99;
constexpr double kLogFloor = 1e-16;

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::optional<double> threshold;  // horizontal reference line in data units
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string data_file(const Axes& axes, const std::string& note, const Series& s) {
    std::string out = "# " + axes.title + "\n";
    out += "# series: " + s.name + "\n";
    out += "# x: " + axes.x_label + "\n";
    out += "# y: " + axes.y_label + (axes.log_y ? " [log scale]" : "") + "\n";
    if (!note.empty()) {
        out += "# " + note + "\n";
    }
    for (const auto& [x, y] : s.points) {
        out += num(x) + " " + num(y) + "\n";
    }
    return out;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string render_svg(const Axes& axes, const std::vector<Series>& series) {
    constexpr double width = 720, height = 460;
    constexpr double left = 80, right = 200, top = 40, bottom = 60;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    auto ty = [&](double y) { return axes.log_y ? std::log10(std::max(y, kLogFloor)) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, ty(y));
            y1 = std::max(y1, ty(y));
        }
    }
    if (axes.threshold) {
        y0 = std::min(y0, ty(*axes.threshold));
        y1 = std::max(y1, ty(*axes.threshold));
    }
    if (axes.log_y) {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
    }
    if (x1 - x0 < 1e-12) {
        x0 -= 1;
        x1 += 1;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= axes.log_y ? 1 : std::max(0.5, std::abs(y0) * 0.1);
        y1 += axes.log_y ? 1 : std::max(0.5, std::abs(y1) * 0.1);
    }
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(axes.title)
        << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks.
    std::vector<double> xticks;
    const double xstep = std::max(1.0, std::ceil((x1 - x0) / 8.0));
    for (double x = std::ceil(x0); x <= x1 + 1e-9; x += xstep) {
        xticks.push_back(x);
    }
    for (double x : xticks) {
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << top + ph << "\" x2=\"" << px(x) << "\" y2=\"" << top + ph + 5
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(x)
            << "</text>\n";
    }
    const int ny = 5;
    for (int i = 0; i <= ny; ++i) {
        double t = y0 + (y1 - y0) * i / ny;
        if (axes.log_y) {
            t = std::round(t);
        }
        const double yv = axes.log_y ? std::pow(10.0, t) : t;
        const double yy = py(yv);
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << yy << "\" x2=\"" << left << "\" y2=\"" << yy
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\">"
            << (axes.log_y ? "1e" + num(t) : num(yv)) << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
        << escape(axes.x_label) << "</text>\n";
    svg << "<text transform=\"translate(20," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(axes.y_label + (axes.log_y ? " (log)" : "")) << "</text>\n";

    if (axes.threshold) {
        const double yy = py(*axes.threshold);
        svg << "<line x1=\"" << left << "\" y1=\"" << yy << "\" x2=\"" << left + pw << "\" y2=\"" << yy
            << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
        svg << "<text x=\"" << left + pw - 4 << "\" y=\"" << yy - 4 << "\" text-anchor=\"end\" fill=\"gray\">"
            << "99% fidelity</text>\n";
    }

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % std::size(palette)];
        std::string pts;
        for (const auto& [x, y] : series[i].points) {
            pts += num(px(x)) + "," + num(py(y)) + " ";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
        for (const auto& [x, y] : series[i].points) {
            svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 14 + 18.0 * static_cast<double>(i);
        svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32 << "\" y2=\""
            << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << escape(series[i].name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string arm_name(const RunRecord& r) {
    return r.slices == 0 ? "baseline" : "quasi-dynamic s=" + std::to_string(r.slices);
}

std::string file_stem(const RunRecord& r) {
    return r.model + "_" + r.lattice;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::vector<RunRecord>& records,
                                              const std::filesystem::path& output_dir) {
    if (records.empty()) {
        throw ContractViolation("emit_plots needs at least one record");
    }
    std::vector<RunRecord> ok;
    std::copy_if(records.begin(), records.end(), std::back_inserter(ok), [](const RunRecord& r) { return r.ok(); });
    if (ok.empty()) {
        throw ContractViolation("every record is a failed cell; nothing to plot");
    }
    std::sort(ok.begin(), ok.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.model, a.lattice, a.slices, a.layers) < std::tie(b.model, b.lattice, b.slices, b.layers);
    });

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const auto path = output_dir / name;
        write_atomically(path, content);
        written.push_back(path);
    };

    // Family: (model, lattice) -> series keyed by slices.
    std::map<std::string, std::map<int, std::vector<const RunRecord*>>> families;
    for (const auto& r : ok) {
        families[file_stem(r)][r.slices].push_back(&r);
    }

    for (const auto& [stem, by_slices] : families) {
        const RunRecord& head = *by_slices.begin()->second.front();
        Axes infid{head.model + " " + head.lattice + ": 1-fidelity vs layers", "layers", "1-fidelity", true,
                   1.0 - kFidelityThreshold};
        Axes evals{head.model + " " + head.lattice + ": function evaluations vs layers", "layers",
                   "function evaluations", false, std::nullopt};
        std::vector<Series> infid_series, eval_series;
        for (const auto& [slices, recs] : by_slices) {
            Series fs{arm_name(*recs.front()), {}};
            Series es{fs.name, {}};
            for (const RunRecord* r : recs) {
                fs.points.emplace_back(r->layers, 1.0 - r->fidelity);
                es.points.emplace_back(r->layers, static_cast<double>(r->totals.cost_evals));
            }
            const std::string suffix = "_s" + std::to_string(slices) + ".dat";
            emit("infidelity_" + stem + suffix, data_file(infid, "", fs));
            emit("evaluations_" + stem + suffix, data_file(evals, "", es));
            infid_series.push_back(std::move(fs));
            eval_series.push_back(std::move(es));
        }
        emit("infidelity_" + stem + ".svg", render_svg(infid, infid_series));
        emit("evaluations_" + stem + ".svg", render_svg(evals, eval_series));

        Axes stairs{head.model + " " + head.lattice + ": fidelity per slicing step", "step", "fidelity", false,
                    kFidelityThreshold};
        std::vector<Series> stair_series;
        for (const auto& [slices, recs] : by_slices) {
            for (const RunRecord* r : recs) {
                if (r->trace.steps.empty()) {
                    continue;
                }
                Series s{r->cell_id(), {}};
                for (const auto& st : r->trace.steps) {
                    s.points.emplace_back(st.step, st.fidelity);
                }
                s.points.emplace_back(static_cast<double>(r->trace.steps.size() + 1), r->trace.final.fidelity);
                emit("staircase_" + stem + "_" + r->cell_id() + ".dat",
                     data_file(stairs, "last row: final full optimization", s));
                stair_series.push_back(std::move(s));
            }
        }
        if (!stair_series.empty()) {
            emit("staircase_" + stem + ".svg", render_svg(stairs, stair_series));
        }
    }
    return written;
}

}  // namespace qdvqe
