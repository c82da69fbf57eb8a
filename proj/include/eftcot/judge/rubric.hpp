#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "eftcot/core/error.hpp"

namespace eftcot::judge {

enum class Dimension {
    SomaticAwareness,
    EmotionalHierarchy,
    CognitiveInsight,
    NeedAnalysis,
    RestructuringPower,
    Relevance,
    EmpathyDepth,
    Helpfulness,
    StructuralProfessionalism,
};

inline constexpr std::array<Dimension, 9> kAllDimensions{
    Dimension::SomaticAwareness, Dimension::EmotionalHierarchy, Dimension::CognitiveInsight,
    Dimension::NeedAnalysis,     Dimension::RestructuringPower, Dimension::Relevance,
    Dimension::EmpathyDepth,     Dimension::Helpfulness,        Dimension::StructuralProfessionalism,
};

/// Dimensions of the EFT dimension table.
inline constexpr std::array<Dimension, 5> kEftDimensions{
    Dimension::SomaticAwareness, Dimension::EmotionalHierarchy, Dimension::CognitiveInsight,
    Dimension::NeedAnalysis, Dimension::RestructuringPower,
};

/// Dimensions of the counseling dimension table.
inline constexpr std::array<Dimension, 4> kGeneralDimensions{
    Dimension::Relevance, Dimension::EmpathyDepth, Dimension::Helpfulness, Dimension::StructuralProfessionalism,
};

/// Identifier form, e.g. "SomaticAwareness".
std::string_view to_string(Dimension d);
/// Human form, e.g. "Somatic Awareness".
std::string_view display_name(Dimension d);
/// Column abbreviation for the counseling table ("Rel.", "Emp.", ...); display name otherwise.
std::string_view short_name(Dimension d);

class UnknownDimensionError : public Error {
public:
    using Error::Error;
};

/// Accepts identifier or display form, case-insensitive, ignoring spaces.
Dimension parse_dimension(std::string_view s);

class RubricError : public Error {
public:
    using Error::Error;
};

struct RubricAnchor {
    int score = 0;
    std::string label;  // "Poor", "Excellent", ...
    std::string text;

    bool operator==(const RubricAnchor&) const = default;
};

struct Rubric {
    Dimension dimension = Dimension::SomaticAwareness;
    std::string definition;
    std::array<RubricAnchor, 5> anchors;

    /// Anchors must be scored 1..5 in order with non-empty text.
    void validate() const;
    bool operator==(const Rubric&) const = default;
};

Rubric default_rubric(Dimension d);

/// Parses a rubric file: "definition: ..." and five "N (Label): text" lines;
/// blank lines and '#' comments are ignored.
Rubric parse_rubric(std::string_view content, Dimension d);
std::string format_rubric(const Rubric& r);

class RubricSet {
public:
    /// Built-in rubrics for all nine dimensions.
    RubricSet();
    /// Built-ins overridden by `<Identifier>.txt` files present in `dir`.
    static RubricSet load_directory(const std::filesystem::path& dir);

    const Rubric& at(Dimension d) const { return rubrics_.at(d); }
    void set(Rubric r);

private:
    std::map<Dimension, Rubric> rubrics_;
};

} // namespace eftcot::judge
