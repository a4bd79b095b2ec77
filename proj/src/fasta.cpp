#include "evoflow/fasta.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evoflow {

std::vector<FastaRecord> read_fasta(std::istream& in) {
  std::vector<FastaRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == ';') continue;
    if (line[0] == '>') {
      FastaRecord rec;
      rec.line = lineno;
      const auto sp = line.find_first_of(" \t");
      if (sp == std::string::npos) {
        rec.id = line.substr(1);
      } else {
        rec.id = line.substr(1, sp - 1);
        rec.desc = line.substr(sp + 1);
      }
      records.push_back(std::move(rec));
    } else {
      if (records.empty())
        throw std::runtime_error("FASTA: sequence data before first header at line " +
                                 std::to_string(lineno));
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) records.back().seq.push_back(c);
    }
  }
  return records;
}

std::vector<FastaRecord> read_fasta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FASTA file: " + path);
  return read_fasta(in);
}

void write_fasta(std::ostream& out, std::span<const FastaRecord> records, int wrap) {
  for (const auto& rec : records) {
    out << '>' << rec.id;
    if (!rec.desc.empty()) out << ' ' << rec.desc;
    out << '\n';
    if (wrap <= 0) {
      out << rec.seq << '\n';
    } else {
      for (size_t i = 0; i < rec.seq.size(); i += size_t(wrap))
        out << rec.seq.substr(i, size_t(wrap)) << '\n';
      if (rec.seq.empty()) out << '\n';
    }
  }
}

void write_fasta_file(const std::string& path, std::span<const FastaRecord> records,
                      const std::string& comment, int wrap) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write FASTA file: " + path);
  if (!comment.empty()) {
    std::istringstream cs(comment);
    std::string line;
    while (std::getline(cs, line)) out << "; " << line << '\n';
  }
  write_fasta(out, records, wrap);
}

std::vector<Sequence> records_to_sequences(std::span<const FastaRecord> records,
                                           const AlphabetPtr& ab, bool aligned,
                                           std::vector<std::string>* msa_rows) {
  std::vector<Sequence> seqs;
  seqs.reserve(records.size());
  if (msa_rows) msa_rows->clear();
  for (const auto& rec : records) {
    std::vector<int> sym;
    sym.reserve(rec.seq.size());
    for (char c : rec.seq) {
      if (aligned && c == ab->gap_symbol()) continue;
      const int idx = ab->try_index(c);
      if (idx < 0)
        throw std::runtime_error("record '" + rec.id + "' (line " + std::to_string(rec.line) +
                                 "): unknown symbol '" + std::string(1, c) + "'");
      sym.push_back(idx);
    }
    if (msa_rows) msa_rows->push_back(rec.seq);
    seqs.emplace_back(ab, std::move(sym));
  }
  return seqs;
}

}  // namespace evoflow
