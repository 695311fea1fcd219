#include "oobr/tabulate.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "oobr/derive.hpp"

namespace oobr {

namespace {

using Ordered = std::vector<std::optional<Category>>;

// Observed keys in table order: declared levels first, then the rest in
// natural order, missing last.
Ordered order_keys(Ordered observed, const CategoryOrder& order) {
    Ordered out;
    for (const auto& level : order.levels) {
        auto it = std::ranges::find_if(observed, [&](const auto& k) { return k && category_text(*k) == level; });
        if (it != observed.end()) {
            out.push_back(*it);
            observed.erase(it);
        }
    }
    std::ranges::sort(observed, CategoryLess{});
    for (auto& k : observed) out.push_back(std::move(k));
    // Missing always closes the list.
    auto miss = std::ranges::find_if(out, [](const auto& k) { return !k.has_value(); });
    if (miss != out.end()) std::rotate(miss, miss + 1, out.end());
    return out;
}

std::string key_label(const std::optional<Category>& k, std::string_view missing) {
    return k ? category_text(*k) : std::string(missing);
}

std::size_t display_width(std::string_view s) {
    // Count UTF-8 code points so accented labels align.
    return static_cast<std::size_t>(std::ranges::count_if(s, [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad_left(std::string_view s, std::size_t w) {
    auto dw = display_width(s);
    return std::string(w > dw ? w - dw : 0, ' ') + std::string(s);
}

std::string pad_right(std::string_view s, std::size_t w) {
    auto dw = display_width(s);
    return std::string(s) + std::string(w > dw ? w - dw : 0, ' ');
}

}  // namespace

bool CategoryLess::operator()(const std::optional<Category>& a, const std::optional<Category>& b) const {
    if (!a || !b) return a.has_value() && !b.has_value();
    return *a < *b;  // variant: long before string, then by value
}

std::string category_text(const Category& c) {
    if (const auto* v = std::get_if<long>(&c)) return std::to_string(*v);
    return std::get<std::string>(c);
}

std::string percent_one_decimal(std::uint64_t n, std::uint64_t total) {
    if (total == 0) return "0.0";
    // floor(1000 n / total + 1/2) in exact integer arithmetic.
    const unsigned __int128 tenths = (static_cast<unsigned __int128>(n) * 2000 + total) / (2 * static_cast<unsigned __int128>(total));
    const auto t = static_cast<std::uint64_t>(tenths);
    return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

// ---------------------------------------------------------------------------

Variable resolve_variable(std::string_view name) {
    Variable v;
    v.name = std::string(name);
    if (name == "ano" || name == "sem") {
        const bool ano = name == "ano";
        v.extract = [ano](const RecordView& r) -> std::optional<Category> {
            if (!r.stamp) return std::nullopt;
            return Category{static_cast<long>(ano ? r.stamp->ano : r.stamp->sem)};
        };
        return v;
    }
    if (auto f = find_field(name)) {
        const FieldId id = *f;
        if (id.kind == FieldId::Kind::Int) {
            v.extract = [id](const RecordView& r) -> std::optional<Category> {
                const auto& x = r.raw->ints[id.index];
                if (!x) return std::nullopt;
                return Category{static_cast<long>(*x)};
            };
        } else {
            v.extract = [id](const RecordView& r) -> std::optional<Category> {
                const auto& x = r.raw->texts[id.index];
                if (!x) return std::nullopt;
                return Category{*x};
            };
        }
        return v;
    }
    if (auto d = find_derived(name)) {
        const auto idx = static_cast<std::size_t>(*d);
        v.extract = [idx, n = v.name](const RecordView& r) -> std::optional<Category> {
            if (!r.derived) throw ConfigError("variable " + n + " is only defined for cohort records");
            const auto& x = (*r.derived)[idx];
            if (!x) return std::nullopt;
            return Category{std::string(*x)};
        };
        auto levels = derived_levels(*d);
        v.order.levels.assign(levels.begin(), levels.end());
        return v;
    }
    throw ConfigError("unknown variable: " + std::string(name));
}

// ---------------------------------------------------------------------------

void FrequencyCounter::add(const std::optional<Category>& value, std::uint64_t n) {
    counts_[value] += n;
    total_ += n;
}

void FrequencyCounter::merge(const FrequencyCounter& o) {
    for (const auto& [k, n] : o.counts_) counts_[k] += n;
    total_ += o.total_;
}

RenderedTable FrequencyCounter::render(std::string name, std::string title, std::string variable,
                                       const CategoryOrder& order) const {
    RenderedTable t;
    t.kind = RenderedTable::Kind::Frequency;
    t.name = std::move(name);
    t.title = std::move(title);
    t.row_variable = std::move(variable);
    t.col_labels = {"n"};
    Ordered keys;
    for (const auto& [k, n] : counts_) keys.push_back(k);
    for (const auto& k : order_keys(std::move(keys), order)) {
        const auto n = counts_.at(k);
        t.row_labels.push_back(key_label(k, kFreqMissingLabel));
        t.cells.push_back({n});
        t.row_totals.push_back(n);
        t.percents.push_back(percent_one_decimal(n, total_));
    }
    t.col_totals = {total_};
    t.grand_total = total_;
    t.percents.push_back("100.0");
    return t;
}

bool CrossCounter::KeyLess::operator()(const Key& a, const Key& b) const {
    CategoryLess less;
    if (less(a.first, b.first)) return true;
    if (less(b.first, a.first)) return false;
    return less(a.second, b.second);
}

void CrossCounter::add(const std::optional<Category>& row, const std::optional<Category>& col, std::uint64_t n) {
    counts_[{row, col}] += n;
    total_ += n;
}

void CrossCounter::merge(const CrossCounter& o) {
    for (const auto& [k, n] : o.counts_) counts_[k] += n;
    total_ += o.total_;
}

RenderedTable CrossCounter::render(std::string name, std::string title, std::string row_variable,
                                   std::string col_variable, const CategoryOrder& row_order,
                                   const CategoryOrder& col_order) const {
    RenderedTable t;
    t.kind = RenderedTable::Kind::Cross;
    t.name = std::move(name);
    t.title = std::move(title);
    t.row_variable = std::move(row_variable);
    t.col_variable = std::move(col_variable);

    std::map<std::optional<Category>, int, CategoryLess> row_seen, col_seen;
    for (const auto& [k, n] : counts_) {
        row_seen[k.first];
        col_seen[k.second];
    }
    Ordered rows, cols;
    for (const auto& [k, _] : row_seen) rows.push_back(k);
    for (const auto& [k, _] : col_seen) cols.push_back(k);
    rows = order_keys(std::move(rows), row_order);
    cols = order_keys(std::move(cols), col_order);

    for (const auto& c : cols) t.col_labels.push_back(key_label(c, kCrossMissingLabel));
    t.col_totals.assign(cols.size(), 0);
    for (const auto& r : rows) {
        t.row_labels.push_back(key_label(r, kCrossMissingLabel));
        std::vector<std::uint64_t> line;
        std::uint64_t sum = 0;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto it = counts_.find({r, cols[j]});
            const std::uint64_t n = it == counts_.end() ? 0 : it->second;
            line.push_back(n);
            sum += n;
            t.col_totals[j] += n;
        }
        t.cells.push_back(std::move(line));
        t.row_totals.push_back(sum);
    }
    t.grand_total = total_;
    return t;
}

// ---------------------------------------------------------------------------

std::string RenderedTable::render_text() const {
    std::ostringstream os;
    if (kind == Kind::Frequency) {
        std::size_t w0 = std::max<std::size_t>(display_width("Total"), display_width(row_variable));
        for (const auto& l : row_labels) w0 = std::max(w0, display_width(l));
        std::size_t wn = std::max<std::size_t>(1, std::to_string(grand_total).size());
        const std::size_t wp = 5;
        os << title << "\n\n";
        os << pad_right(row_variable, w0) << "  " << pad_left("n", wn) << "  " << pad_left("%", wp) << '\n';
        for (std::size_t i = 0; i < row_labels.size(); ++i)
            os << pad_right(row_labels[i], w0) << "  " << pad_left(std::to_string(cells[i][0]), wn) << "  "
               << pad_left(percents[i], wp) << '\n';
        os << pad_right("Total", w0) << "  " << pad_left(std::to_string(grand_total), wn) << "  "
           << pad_left(percents.back(), wp) << '\n';
        return os.str();
    }

    std::size_t w0 = std::max<std::size_t>(display_width("Total"), display_width(row_variable));
    for (const auto& l : row_labels) w0 = std::max(w0, display_width(l));
    std::size_t wc = std::max<std::size_t>(std::to_string(grand_total).size(), display_width("Total"));
    for (const auto& l : col_labels) wc = std::max(wc, display_width(l));
    wc = std::max(wc, display_width(col_variable));
    const std::size_t ncol = col_labels.size() + 1;
    const std::string rule = std::string(w0, '-') + std::string(ncol * (wc + 2), '-');

    os << title << '\n' << row_variable << " * " << col_variable << "\n\n";
    os << rule << '\n';
    os << pad_right("", w0) << "  " << pad_left(col_variable, wc);
    // The column-variable name sits over the first column; shift labels right of it.
    os << '\n' << pad_right(row_variable, w0);
    for (const auto& l : col_labels) os << "  " << pad_left(l, wc);
    os << "  " << pad_left("Total", wc) << '\n';
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        os << pad_left(row_labels[i], w0);
        for (auto n : cells[i]) os << "  " << pad_left(std::to_string(n), wc);
        os << "  " << pad_left(std::to_string(row_totals[i]), wc) << '\n';
    }
    os << pad_left("Total", w0);
    for (auto n : col_totals) os << "  " << pad_left(std::to_string(n), wc);
    os << "  " << pad_left(std::to_string(grand_total), wc) << '\n';
    os << rule << '\n';
    return os.str();
}

std::string RenderedTable::render_csv(char d) const {
    std::string out;
    auto field = [&](std::string_view v) {
        bool quote = v.find_first_of(std::string{d, '"', '\n', '\r'}) != std::string_view::npos;
        if (!quote) {
            out += v;
            return;
        }
        out += '"';
        for (char c : v) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    };
    field(row_variable);
    if (kind == Kind::Frequency) {
        out += d;
        out += "n";
        out += d;
        out += "percent\n";
        for (std::size_t i = 0; i < row_labels.size(); ++i) {
            field(row_labels[i]);
            out += d + std::to_string(cells[i][0]) + d + percents[i] + "\n";
        }
        out += "Total";
        out += d + std::to_string(grand_total) + d + percents.back() + "\n";
        return out;
    }
    for (const auto& l : col_labels) {
        out += d;
        field(l);
    }
    out += d;
    out += "Total\n";
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        field(row_labels[i]);
        for (auto n : cells[i]) out += d + std::to_string(n);
        out += d + std::to_string(row_totals[i]) + "\n";
    }
    out += "Total";
    for (auto n : col_totals) out += d + std::to_string(n);
    out += d + std::to_string(grand_total) + "\n";
    return out;
}

std::string RenderedTable::render_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["title"] = title;
    j["kind"] = kind == Kind::Frequency ? "frequency" : "cross";
    j["row_variable"] = row_variable;
    if (kind == Kind::Cross) j["col_variable"] = col_variable;
    j["rows"] = row_labels;
    j["cols"] = col_labels;
    j["cells"] = cells;
    j["totals"] = {{"rows", row_totals}, {"cols", col_totals}, {"grand", grand_total}};
    if (kind == Kind::Frequency) j["percents"] = percents;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

RenderedTable frequency_table(std::span<const RecordView> stream, std::string_view variable,
                              std::optional<CategoryOrder> order) {
    auto v = resolve_variable(variable);
    FrequencyCounter counter;
    for (const auto& r : stream) counter.add(v.extract(r));
    return counter.render(v.name, "Frequency table for " + v.name, v.name, order ? *order : v.order);
}

RenderedTable cross_table(std::span<const RecordView> stream, std::string_view row_variable,
                          std::string_view col_variable) {
    auto rv = resolve_variable(row_variable);
    auto cv = resolve_variable(col_variable);
    CrossCounter counter;
    for (const auto& r : stream) counter.add(rv.extract(r), cv.extract(r));
    return counter.render(rv.name + "_by_" + cv.name, "Cross-Tabulation", rv.name, cv.name, rv.order, cv.order);
}

}  // namespace oobr
