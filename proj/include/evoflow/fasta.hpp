#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evoflow/alphabet.hpp"

namespace evoflow {

struct FastaRecord {
  std::string id;
  std::string desc;
  std::string seq;
  int line = 0;  // header line number in the source, 1-based
};

// Read FASTA: '>' header lines, sequence lines, ';' comment lines skipped.
// Whitespace inside sequence lines is ignored. Throws std::runtime_error on
// malformed input (data before the first header).
std::vector<FastaRecord> read_fasta(std::istream& in);
std::vector<FastaRecord> read_fasta_file(const std::string& path);

void write_fasta(std::ostream& out, std::span<const FastaRecord> records, int wrap = 80);
void write_fasta_file(const std::string& path, std::span<const FastaRecord> records,
                      const std::string& comment = "", int wrap = 80);

// Convert records to sequences over an alphabet. In aligned mode the gap
// symbol is accepted and dropped (the gapped rows are returned separately
// when msa_rows is non-null). Unknown symbols raise std::runtime_error
// naming the record and line.
std::vector<Sequence> records_to_sequences(std::span<const FastaRecord> records,
                                           const AlphabetPtr& ab, bool aligned,
                                           std::vector<std::string>* msa_rows = nullptr);

}  // namespace evoflow
