// Frequency tables and cross-tabulations with exact integer counts.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "oobr/schema.hpp"

namespace oobr {

/// A category value: integer code or text label. Missing is modelled
/// separately as an empty optional.
using Category = std::variant<long, std::string>;

/// Orders integers numerically and text bytewise; missing sorts last.
struct CategoryLess {
    bool operator()(const std::optional<Category>& a, const std::optional<Category>& b) const;
};

std::string category_text(const Category& c);

struct CategoryOrder {
    /// Categories listed here come first, in this order; anything else
    /// observed follows in natural order.
    std::vector<std::string> levels;

    static CategoryOrder natural() { return {}; }
    static CategoryOrder declared(std::vector<std::string> levels) { return {std::move(levels)}; }
};

/// What a table looks at: the raw record, its epi stamp at that point of the
/// pipeline, and (for cohort records) the derived variables.
struct RecordView {
    const SurveillanceRecord* raw = nullptr;
    std::optional<EpiStamp> stamp;
    const DerivedValues* derived = nullptr;

    static RecordView of(const CohortRecord& c) { return {&c.raw, c.stamp, &c.derived}; }
};

/// A named column extractor.
struct Variable {
    std::string name;
    std::function<std::optional<Category>(const RecordView&)> extract;
    CategoryOrder order;
};

/// Resolves raw field names, "ano", "sem" and derived variable names.
/// Throws ConfigError for anything else.
Variable resolve_variable(std::string_view name);

struct RenderedTable {
    enum class Kind : std::uint8_t { Frequency, Cross } kind = Kind::Frequency;
    std::string name;
    std::string title;
    std::string row_variable;
    std::string col_variable;  // empty for frequency tables
    std::vector<std::string> row_labels;  // missing row (if any) last
    std::vector<std::string> col_labels;  // frequency tables: {"n"}
    std::vector<std::vector<std::uint64_t>> cells;
    std::vector<std::uint64_t> row_totals;
    std::vector<std::uint64_t> col_totals;
    std::uint64_t grand_total = 0;
    /// Frequency tables only: one-decimal percentages per row, over the grand total.
    std::vector<std::string> percents;

    std::string render_text() const;
    std::string render_csv(char delimiter = ';') const;
    std::string render_json() const;
    bool operator==(const RenderedTable&) const = default;
};

/// Half-up rounding of 100 * n / total to one decimal, as text ("66.7").
std::string percent_one_decimal(std::uint64_t n, std::uint64_t total);

inline constexpr std::string_view kFreqMissingLabel = "NA";
inline constexpr std::string_view kCrossMissingLabel = "<NA>";

/// Additive category counter.
class FrequencyCounter {
public:
    void add(const std::optional<Category>& value, std::uint64_t n = 1);
    void merge(const FrequencyCounter& o);
    std::uint64_t total() const { return total_; }
    const std::map<std::optional<Category>, std::uint64_t, CategoryLess>& counts() const { return counts_; }
    RenderedTable render(std::string name, std::string title, std::string variable, const CategoryOrder& order) const;
    bool operator==(const FrequencyCounter&) const = default;

private:
    std::map<std::optional<Category>, std::uint64_t, CategoryLess> counts_;
    std::uint64_t total_ = 0;
};

class CrossCounter {
public:
    using Key = std::pair<std::optional<Category>, std::optional<Category>>;

    void add(const std::optional<Category>& row, const std::optional<Category>& col, std::uint64_t n = 1);
    void merge(const CrossCounter& o);
    std::uint64_t total() const { return total_; }
    RenderedTable render(std::string name, std::string title, std::string row_variable, std::string col_variable,
                         const CategoryOrder& row_order, const CategoryOrder& col_order) const;
    bool operator==(const CrossCounter&) const = default;

private:
    struct KeyLess {
        bool operator()(const Key& a, const Key& b) const;
    };
    std::map<Key, std::uint64_t, KeyLess> counts_;
    std::uint64_t total_ = 0;
};

RenderedTable frequency_table(std::span<const RecordView> stream, std::string_view variable,
                              std::optional<CategoryOrder> order = std::nullopt);
RenderedTable cross_table(std::span<const RecordView> stream, std::string_view row_variable,
                          std::string_view col_variable);

}  // namespace oobr
