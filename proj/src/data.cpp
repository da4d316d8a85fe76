#include "karnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "karnet/errors.hpp"
#include "karnet/textio.hpp"

namespace karnet {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double_field(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string field = trim(raw);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError(row, col, "'" + field + "' is not a number");
    return v;
}

Matrix indicator_from_labels(const std::vector<int>& labels, std::size_t n_classes) {
    Matrix y(labels.size(), n_classes, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i)
        y(i, static_cast<std::size_t>(labels[i])) = 1.0;
    return y;
}

}  // namespace

void Dataset::validate() const {
    if (x.rows() == 0) throw InvalidArgument("dataset has no rows");
    if (y.rows() != 0 && y.rows() != x.rows())
        throw ShapeMismatch("dataset targets have " + std::to_string(y.rows()) +
                            " rows for " + std::to_string(x.rows()) + " samples");
    if (!labels.empty()) {
        if (labels.size() != x.rows())
            throw ShapeMismatch("dataset has " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(x.rows()) + " samples");
        for (int l : labels)
            if (l < 0 || static_cast<std::size_t>(l) >= class_names.size())
                throw InvalidArgument("label index " + std::to_string(l) +
                                      " out of range for " + std::to_string(class_names.size()) +
                                      " classes");
    }
    if (!x.all_finite() || !y.all_finite())
        throw NonFiniteInput("dataset contains non-finite values");
}

// --- generators ----------------------------------------------------------------

Dataset gen_sinc(const SincConfig& cfg) {
    if (cfg.noise_fraction < 0.0 || cfg.noise_fraction >= 1.0)
        throw InvalidArgument("sinc noise_fraction must lie in [0, 1)");

    const std::size_t base = 8;
    const std::size_t m = base * (1 + cfg.noisy_replicas);
    Dataset ds;
    ds.x = Matrix(m, 1, 0.0);
    ds.y = Matrix(m, 1, 0.0);
    ds.meta.source = "sinc";
    ds.meta.seed = cfg.seed;

    double clean_y[base];
    for (std::size_t i = 0; i < base; ++i) {
        const double x = static_cast<double>(i + 1);
        clean_y[i] = std::sin(2.0 * x) / (2.0 * x);
        ds.x(i, 0) = x;
        ds.y(i, 0) = clean_y[i];
        ds.meta.clean_rows.push_back(i);
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> noise(-cfg.noise_fraction, cfg.noise_fraction);
    for (std::size_t r = 0; r < cfg.noisy_replicas; ++r) {
        for (std::size_t i = 0; i < base; ++i) {
            const std::size_t row = base * (r + 1) + i;
            ds.x(row, 0) = static_cast<double>(i + 1);
            ds.y(row, 0) = clean_y[i] * (1.0 + noise(rng));
        }
    }
    return ds;
}

Dataset gen_xor() {
    Dataset ds;
    ds.x = Matrix{{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.001, 1.001}};
    ds.y = Matrix{{0.0}, {0.0}, {1.0}, {1.0}};
    ds.labels = {0, 0, 1, 1};
    ds.class_names = {"0", "1"};
    ds.meta.source = "xor";
    return ds;
}

Dataset gen_spiral(const SpiralConfig& cfg) {
    if (cfg.arms < 2) throw InvalidArgument("spiral needs at least two arms");
    if (cfg.points_per_arm == 0) throw InvalidArgument("spiral needs points_per_arm >= 1");
    if (cfg.noise_std < 0.0) throw InvalidArgument("spiral noise_std must be >= 0");
    if (cfg.turns <= 0.0 || cfg.r_max <= 0.0)
        throw InvalidArgument("spiral turns and r_max must be positive");

    const std::size_t m = cfg.arms * cfg.points_per_arm;
    Dataset ds;
    ds.x = Matrix(m, 2, 0.0);
    ds.labels.resize(m);
    ds.meta.source = "spiral";
    ds.meta.seed = cfg.seed;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, cfg.noise_std > 0.0 ? cfg.noise_std : 1.0);

    // Draw order per point is (t, dx, dy), arms outermost, so the stream is
    // reproducible regardless of arm count changes downstream of a point.
    std::size_t row = 0;
    for (std::size_t arm = 0; arm < cfg.arms; ++arm) {
        const double offset = 2.0 * std::numbers::pi * static_cast<double>(arm) /
                              static_cast<double>(cfg.arms);
        for (std::size_t p = 0; p < cfg.points_per_arm; ++p, ++row) {
            const double t = unit(rng);
            const double dx = cfg.noise_std > 0.0 ? jitter(rng) : 0.0;
            const double dy = cfg.noise_std > 0.0 ? jitter(rng) : 0.0;
            const double r = cfg.r_max * t;
            const double theta = 2.0 * std::numbers::pi * cfg.turns * t + offset;
            ds.x(row, 0) = r * std::cos(theta) + dx;
            ds.x(row, 1) = r * std::sin(theta) + dy;
            ds.labels[row] = static_cast<int>(arm);
        }
    }
    for (std::size_t arm = 0; arm < cfg.arms; ++arm)
        ds.class_names.push_back(std::to_string(arm));
    ds.y = indicator_from_labels(ds.labels, cfg.arms);
    return ds;
}

// --- encoding plans ------------------------------------------------------------

EncodingPlan EncodingPlan::parse(const std::string& text) {
    EncodingPlan plan;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool saw_label = false;

    auto fail = [&](const std::string& what) -> void {
        throw InvalidArgument("plan line " + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::istringstream ls(line);
        std::string key;
        ls >> key;

        if (key == "header") {
            std::string v;
            ls >> v;
            if (v == "true") plan.has_header = true;
            else if (v == "false") plan.has_header = false;
            else fail("header expects true or false");
        } else if (key == "label") {
            std::string v;
            ls >> v;
            if (v == "first") plan.label_position = LabelPosition::first;
            else if (v == "last") plan.label_position = LabelPosition::last;
            else if (v == "none") plan.label_position = LabelPosition::none;
            else fail("label expects first, last or none");
            saw_label = true;
        } else if (key == "label_numeric") {
            std::string v;
            ls >> v;
            if (v == "true") plan.label_numeric = true;
            else if (v == "false") plan.label_numeric = false;
            else fail("label_numeric expects true or false");
        } else if (key == "classes") {
            std::string rest;
            std::getline(ls, rest);
            for (const std::string& c : split(trim(rest), ',')) {
                const std::string name = trim(c);
                if (name.empty()) fail("empty class name");
                plan.label_classes.push_back(name);
            }
        } else if (key == "feature") {
            Column col;
            std::string kind;
            ls >> col.name >> kind;
            if (col.name.empty() || kind.empty()) fail("feature expects a name and a kind");
            if (kind == "ordinal") {
                col.kind = ColumnKind::ordinal_categorical;
                std::string rest;
                std::getline(ls, rest);
                const std::string listing = trim(rest);
                if (listing.empty())
                    fail("ordinal feature '" + col.name + "' lists no categories");
                for (const std::string& c : split(listing, ',')) {
                    const std::string name = trim(c);
                    if (name.empty()) fail("empty category in ordinal feature '" + col.name + "'");
                    col.categories.push_back(name);
                }
            } else if (kind == "numeric") {
                col.kind = ColumnKind::numeric;
                std::string mode;
                ls >> mode;
                if (mode.empty() || mode == "minmax") {
                    col.scaling = NumericScaling::minmax;
                } else if (mode == "raw") {
                    col.scaling = NumericScaling::raw;
                } else if (mode == "range") {
                    col.scaling = NumericScaling::fixed_range;
                    if (!(ls >> col.range_lo >> col.range_hi) || !(col.range_lo < col.range_hi))
                        fail("range expects two numbers with lo < hi");
                } else {
                    fail("unknown numeric mode '" + mode + "'");
                }
            } else {
                fail("unknown feature kind '" + kind + "'");
            }
            plan.columns.push_back(std::move(col));
        } else {
            fail("unknown directive '" + key + "'");
        }
    }

    if (plan.columns.empty()) throw InvalidArgument("plan declares no feature columns");
    if (!saw_label && plan.label_numeric)
        throw InvalidArgument("label_numeric given without a label directive");
    return plan;
}

EncodingPlan EncodingPlan::load(const std::string& path) { return parse(read_text_file(path)); }

EncodingPlan EncodingPlan::all_numeric(std::size_t n_features, LabelPosition pos,
                                       bool numeric_label, NumericScaling scaling) {
    if (n_features == 0) throw InvalidArgument("plan needs at least one feature");
    EncodingPlan plan;
    plan.label_position = pos;
    plan.label_numeric = numeric_label;
    for (std::size_t i = 0; i < n_features; ++i) {
        Column col;
        col.name = "x" + std::to_string(i + 1);
        col.kind = ColumnKind::numeric;
        col.scaling = scaling;
        plan.columns.push_back(std::move(col));
    }
    return plan;
}

std::string builtin_plan_text(const std::string& dataset) {
    if (dataset == "nursery") {
        return "# nursery: ordinal attribute encoding, class label in the last column\n"
               "label last\n"
               "classes not_recom,recommend,very_recom,priority,spec_prior\n"
               "feature parents ordinal usual,pretentious,great_pret\n"
               "feature has_nurs ordinal proper,less_proper,improper,critical,very_crit\n"
               "feature form ordinal complete,completed,incomplete,foster\n"
               "feature children ordinal 1,2,3,more\n"
               "feature housing ordinal convenient,less_conv,critical\n"
               "feature finance ordinal convenient,inconv\n"
               "feature social ordinal nonprob,slightly_prob,problematic\n"
               "feature health ordinal recommended,priority,not_recom\n";
    }
    if (dataset == "letter") {
        static const char* names[] = {"x-box", "y-box", "width", "high",  "onpix", "x-bar",
                                      "y-bar", "x2bar", "y2bar", "xybar", "x2ybr", "xy2br",
                                      "x-ege", "xegvy", "y-ege", "yegvx"};
        std::string text =
            "# letter: 16 integer attributes in [0,15], class label in the first column\n"
            "label first\n"
            "classes A,B,C,D,E,F,G,H,I,J,K,L,M,N,O,P,Q,R,S,T,U,V,W,X,Y,Z\n";
        for (const char* n : names)
            text += "feature " + std::string(n) + " numeric range 0 15\n";
        return text;
    }
    if (dataset == "optdigit") {
        std::string text =
            "# optdigit: 64 on-pixel counts in [0,16], class label in the last column\n"
            "label last\n"
            "classes 0,1,2,3,4,5,6,7,8,9\n";
        for (int i = 1; i <= 64; ++i)
            text += "feature p" + std::to_string(i) + " numeric range 0 16\n";
        return text;
    }
    throw InvalidArgument("no built-in plan for dataset '" + dataset + "'");
}

// --- CSV loading ---------------------------------------------------------------

Dataset load_csv(const std::string& path, const EncodingPlan& plan) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file '" + path + "'");

    const bool has_label = plan.label_position != EncodingPlan::LabelPosition::none;
    const std::size_t expect_fields = plan.columns.size() + (has_label ? 1 : 0);
    const std::size_t label_field =
        plan.label_position == EncodingPlan::LabelPosition::first ? 0 : plan.columns.size();

    std::vector<std::vector<double>> raw_cols(plan.columns.size());
    std::vector<std::string> raw_labels;

    std::string line;
    std::size_t lineno = 0;
    bool header_pending = plan.has_header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != expect_fields)
            throw ParseError(lineno, fields.size(),
                             "expected " + std::to_string(expect_fields) + " fields, found " +
                                 std::to_string(fields.size()));

        std::size_t feature_idx = 0;
        for (std::size_t f = 0; f < fields.size(); ++f) {
            if (has_label && f == label_field) {
                raw_labels.push_back(trim(fields[f]));
                continue;
            }
            const EncodingPlan::Column& col = plan.columns[feature_idx];
            if (col.kind == EncodingPlan::ColumnKind::ordinal_categorical) {
                const std::string v = trim(fields[f]);
                auto it = std::find(col.categories.begin(), col.categories.end(), v);
                if (it == col.categories.end())
                    throw UnknownCategory(lineno, f + 1,
                                          "'" + v + "' is not a category of feature '" +
                                              col.name + "'");
                // Category i of N maps to (i+1)/N so every code is positive
                // and the top category lands exactly on 1.
                const double i = static_cast<double>(it - col.categories.begin());
                raw_cols[feature_idx].push_back((i + 1.0) /
                                                static_cast<double>(col.categories.size()));
            } else {
                raw_cols[feature_idx].push_back(parse_double_field(fields[f], lineno, f + 1));
            }
            ++feature_idx;
        }
    }

    const std::size_t m = raw_cols.empty() ? 0 : raw_cols[0].size();
    if (m == 0) throw IoError("CSV file '" + path + "' contains no data rows");

    // Numeric rescaling passes.
    for (std::size_t c = 0; c < plan.columns.size(); ++c) {
        const EncodingPlan::Column& col = plan.columns[c];
        if (col.kind != EncodingPlan::ColumnKind::numeric) continue;
        if (col.scaling == EncodingPlan::NumericScaling::raw) continue;
        double lo, hi;
        if (col.scaling == EncodingPlan::NumericScaling::fixed_range) {
            lo = col.range_lo;
            hi = col.range_hi;
        } else {
            auto [mn, mx] = std::minmax_element(raw_cols[c].begin(), raw_cols[c].end());
            lo = *mn;
            hi = *mx;
        }
        for (double& v : raw_cols[c]) v = (hi > lo) ? (v - lo) / (hi - lo) : 0.0;
    }

    Dataset ds;
    ds.x = Matrix(m, plan.columns.size(), 0.0);
    for (std::size_t c = 0; c < plan.columns.size(); ++c)
        for (std::size_t r = 0; r < m; ++r) ds.x(r, c) = raw_cols[c][r];
    ds.meta.source = path;

    if (has_label && plan.label_numeric) {
        ds.y = Matrix(m, 1, 0.0);
        for (std::size_t r = 0; r < m; ++r)
            ds.y(r, 0) = parse_double_field(raw_labels[r], r + 1, label_field + 1);
    } else if (has_label) {
        std::vector<std::string> classes = plan.label_classes;
        if (classes.empty()) {
            classes = raw_labels;
            std::sort(classes.begin(), classes.end());
            classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
        }
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < classes.size(); ++i)
            index[classes[i]] = static_cast<int>(i);
        ds.labels.reserve(m);
        for (std::size_t r = 0; r < m; ++r) {
            auto it = index.find(raw_labels[r]);
            if (it == index.end())
                throw UnknownCategory(r + 1, label_field + 1,
                                      "'" + raw_labels[r] + "' is not a declared class");
            ds.labels.push_back(it->second);
        }
        ds.class_names = std::move(classes);
        ds.y = indicator_from_labels(ds.labels, ds.class_names.size());
    }
    ds.validate();
    return ds;
}

// --- dataset surgery -----------------------------------------------------------

Dataset concat(const Dataset& a, const Dataset& b) {
    if (a.features() != b.features())
        throw ShapeMismatch("concat feature mismatch: " + std::to_string(a.features()) + " vs " +
                            std::to_string(b.features()));
    if (a.class_names != b.class_names)
        throw InvalidArgument("concat requires identical class lists");
    if (a.targets() != b.targets())
        throw ShapeMismatch("concat target mismatch: " + std::to_string(a.targets()) + " vs " +
                            std::to_string(b.targets()));

    Dataset out;
    const std::size_t m = a.samples() + b.samples();
    out.x = Matrix(m, a.features(), 0.0);
    out.y = Matrix(m, a.targets(), 0.0);
    for (std::size_t r = 0; r < a.samples(); ++r) {
        for (std::size_t c = 0; c < a.features(); ++c) out.x(r, c) = a.x(r, c);
        for (std::size_t c = 0; c < a.targets(); ++c) out.y(r, c) = a.y(r, c);
    }
    for (std::size_t r = 0; r < b.samples(); ++r) {
        for (std::size_t c = 0; c < b.features(); ++c) out.x(a.samples() + r, c) = b.x(r, c);
        for (std::size_t c = 0; c < b.targets(); ++c) out.y(a.samples() + r, c) = b.y(r, c);
    }
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.class_names = a.class_names;
    out.meta.source = a.meta.source + "+" + b.meta.source;
    out.validate();
    return out;
}

Dataset merge_class(const Dataset& ds, const std::string& from, const std::string& to) {
    auto find = [&](const std::string& name) -> int {
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), name);
        if (it == ds.class_names.end()) throw UnknownLabel("no class named '" + name + "'");
        return static_cast<int>(it - ds.class_names.begin());
    };
    const int src = find(from);
    const int dst = find(to);
    if (src == dst) throw InvalidArgument("cannot merge class '" + from + "' into itself");

    Dataset out;
    out.x = ds.x;
    out.meta = ds.meta;
    for (std::size_t i = 0; i < ds.class_names.size(); ++i)
        if (static_cast<int>(i) != src) out.class_names.push_back(ds.class_names[i]);

    out.labels.reserve(ds.labels.size());
    for (int l : ds.labels) {
        int n = (l == src) ? dst : l;
        if (n > src) --n;
        out.labels.push_back(n);
    }
    out.y = indicator_from_labels(out.labels, out.class_names.size());
    out.validate();
    return out;
}

Dataset nursery_merge(const Dataset& ds) { return merge_class(ds, "recommend", "very_recom"); }

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw InvalidArgument("subset needs at least one row");
    Dataset out;
    out.x = Matrix(idx.size(), ds.features(), 0.0);
    out.y = Matrix(idx.size(), ds.targets(), 0.0);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] >= ds.samples())
            throw InvalidArgument("subset index " + std::to_string(idx[r]) + " out of range");
        for (std::size_t c = 0; c < ds.features(); ++c) out.x(r, c) = ds.x(idx[r], c);
        for (std::size_t c = 0; c < ds.targets(); ++c) out.y(r, c) = ds.y(idx[r], c);
        if (ds.has_labels()) out.labels.push_back(ds.labels[idx[r]]);
    }
    out.class_names = ds.class_names;
    out.meta = ds.meta;
    out.validate();
    return out;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
    ds.validate();
    std::ostringstream body;
    for (std::size_t c = 0; c < ds.features(); ++c) body << (c ? "," : "") << "x" << (c + 1);
    if (ds.has_labels()) {
        body << ",label";
    } else {
        for (std::size_t c = 0; c < ds.targets(); ++c)
            body << ",y" << (ds.targets() > 1 ? std::to_string(c + 1) : "");
    }
    body << "\n";

    for (std::size_t r = 0; r < ds.samples(); ++r) {
        for (std::size_t c = 0; c < ds.features(); ++c)
            body << (c ? "," : "") << format_double(ds.x(r, c));
        if (ds.has_labels()) {
            body << "," << ds.class_names[static_cast<std::size_t>(ds.labels[r])];
        } else {
            for (std::size_t c = 0; c < ds.targets(); ++c) body << "," << format_double(ds.y(r, c));
        }
        body << "\n";
    }
    atomic_write_text(path, body.str());
}

}  // namespace karnet
