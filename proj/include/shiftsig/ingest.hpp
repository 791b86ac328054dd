#pragma once

// On-disk formats. All text is UTF-8 with '\n' line endings; readers reject
// malformed input with the offending line (text) or byte offset (binary).
//
// Occurrences, JSONL:
//   {"format":"sseb-jsonl","version":1,"dim":D}
//   {"w":"<word>","t":"C1"|"C2","v":[D numbers]}        one line per occurrence
//
// Occurrences, binary (little-endian):
//   "SSEB" | u16 version = 1 | u32 dim
//   then per record: u16 word_len | word bytes | u8 period (0 = C1, 1 = C2) | dim x f32
//
// Writers emit words in byte order, and within a word all C1 rows then all C2
// rows, each in stored order.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "shiftsig/core.hpp"
#include "shiftsig/evaluate.hpp"
#include "shiftsig/multiplicity.hpp"
#include "shiftsig/simulate.hpp"

namespace shiftsig::ingest {

inline constexpr std::string_view kJsonlFormat = "sseb-jsonl";
inline constexpr char kBinaryMagic[4] = {'S', 'S', 'E', 'B'};
inline constexpr std::uint16_t kFormatVersion = 1;

OccurrenceSet read_occurrences_jsonl(std::istream& in);
OccurrenceSet read_occurrences_jsonl(const std::filesystem::path& path);
void write_occurrences_jsonl(const OccurrenceSet& set, std::ostream& out);
void write_occurrences_jsonl(const OccurrenceSet& set, const std::filesystem::path& path);

OccurrenceSet read_occurrences_binary(std::istream& in);
OccurrenceSet read_occurrences_binary(const std::filesystem::path& path);
void write_occurrences_binary(const OccurrenceSet& set, std::ostream& out);
void write_occurrences_binary(const OccurrenceSet& set, const std::filesystem::path& path);

/// Binary when the file starts with the SSEB magic, JSONL otherwise.
OccurrenceSet read_occurrences(const std::filesystem::path& path);
/// Binary for a ".bin" extension, JSONL otherwise.
void write_occurrences(const OccurrenceSet& set, const std::filesystem::path& path);

/// "word\tscore" rows; an optional first line "word\tscore" is a header.
/// Throws DuplicateWord or MalformedRow.
evaluate::AnnotationTable read_annotations(std::istream& in);
evaluate::AnnotationTable read_annotations(const std::filesystem::path& path);

inline constexpr std::string_view kResultsHeader =
    "word\tn1\tn2\tdistance\tp_raw\tp_adjusted\tmethod\tn_used";

/// Rows sorted by distance descending (ties by word); reals at 6 significant digits.
void write_results(std::span<const ShiftResult> rows, std::ostream& out);
void write_results(std::span<const ShiftResult> rows, const std::filesystem::path& path);
/// Rows in file order. Throws MalformedHeader, MalformedRow, DuplicateWord.
std::vector<ShiftResult> read_results(std::istream& in);
std::vector<ShiftResult> read_results(const std::filesystem::path& path);

inline constexpr std::string_view kGroundTruthHeader = "acceptor\tdonor\tproportion\tinjected_count";

void write_ground_truth(const simulate::SimulationGroundTruth& truth, std::ostream& out);
void write_ground_truth(const simulate::SimulationGroundTruth& truth, const std::filesystem::path& path);
simulate::SimulationGroundTruth read_ground_truth(std::istream& in);
simulate::SimulationGroundTruth read_ground_truth(const std::filesystem::path& path);

/// One word per line; blank lines skipped, repeats dropped.
std::vector<std::string> read_word_list(const std::filesystem::path& path);

}  // namespace shiftsig::ingest
