#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "invivo/channel_realization.hpp"
#include "invivo/errors.hpp"

namespace invivo {

inline constexpr std::string_view kMimoChannelHeader =
    "subcarrier,h11_re,h11_im,h12_re,h12_im,h21_re,h21_im,h22_re,h22_im";
inline constexpr std::string_view kSisoChannelHeader = "subcarrier,h_re,h_im";

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads a channel CSV. `expected_streams` of 0 accepts either layout.
inline ChannelRealization load_channel_file(const std::filesystem::path& path, int expected_n_data,
                                            int expected_streams = 0) {
  using Kind = ChannelFileError::Kind;
  std::ifstream in(path);
  if (!in) throw ChannelFileError(Kind::MissingFile, "channel file not found: " + path.string());

  const auto where = [&](std::size_t line_no) { return path.string() + ":" + std::to_string(line_no) + ": "; };

  std::string line;
  std::size_t line_no = 0;
  int streams = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == kMimoChannelHeader)
      streams = 2;
    else if (t == kSisoChannelHeader)
      streams = 1;
    else
      throw ChannelFileError(Kind::MalformedHeader, where(line_no) + "unrecognised header '" + std::string(t) + "'");
    break;
  }
  if (streams == 0) throw ChannelFileError(Kind::MalformedHeader, path.string() + ": missing header");
  if (expected_streams != 0 && streams != expected_streams)
    throw ChannelFileError(Kind::MalformedHeader, path.string() + ": file has " + std::to_string(streams) +
                                                      " stream(s), expected " + std::to_string(expected_streams));

  const std::size_t n_fields = streams == 2 ? 9 : 3;
  ChannelRealization ch;
  ch.n_streams = streams;
  ch.source = "file:" + path.string();
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split_csv(t);
    if (fields.size() != n_fields)
      throw ChannelFileError(Kind::MalformedRow, where(line_no) + "expected " + std::to_string(n_fields) + " fields");

    long index = -1;
    const auto idx = detail::trim(fields[0]);
    const auto [iend, iec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (iec != std::errc{} || iend != idx.data() + idx.size() || index != static_cast<long>(ch.matrices.size()))
      throw ChannelFileError(Kind::MalformedRow,
                             where(line_no) + "subcarrier index must be " + std::to_string(ch.matrices.size()));

    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto f = detail::trim(fields[i]);
      double v = 0.0;
      const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || end != f.data() + f.size() || f.empty())
        throw ChannelFileError(Kind::MalformedRow, where(line_no) + "bad number '" + std::string(f) + "'");
      if (!std::isfinite(v)) throw ChannelFileError(Kind::NonFinite, where(line_no) + "non-finite value");
      values.push_back(v);
    }
    Matrix2c h;
    if (streams == 2) {
      for (std::size_t e = 0; e < 4; ++e) h.m[e] = {values[2 * e], values[2 * e + 1]};
    } else {
      h(0, 0) = {values[0], values[1]};
    }
    ch.matrices.push_back(h);
  }
  if (ch.matrices.size() != static_cast<std::size_t>(expected_n_data))
    throw ChannelFileError(Kind::WrongRowCount, path.string() + ": " + std::to_string(ch.matrices.size()) +
                                                    " rows, expected " + std::to_string(expected_n_data));
  return ch;
}

inline void write_channel_csv(std::ostream& out, const ChannelRealization& ch) {
  out << (ch.n_streams == 2 ? kMimoChannelHeader : kSisoChannelHeader) << '\n';
  for (std::size_t k = 0; k < ch.matrices.size(); ++k) {
    out << k;
    const auto& h = ch.matrices[k];
    const std::size_t entries = ch.n_streams == 2 ? 4 : 1;
    for (std::size_t e = 0; e < entries; ++e)
      out << ',' << detail::format_double(h.m[e].real()) << ',' << detail::format_double(h.m[e].imag());
    out << '\n';
  }
}

inline void save_channel_file(const ChannelRealization& ch, const std::filesystem::path& path,
                              std::string_view comment = {}) {
  using Kind = ChannelFileError::Kind;
  if (path.empty()) throw ChannelFileError(Kind::Io, "save_channel_file: empty path");
  ch.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ChannelFileError(Kind::Io, "cannot open for writing: " + path.string());
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  write_channel_csv(out, ch);
  out.flush();
  if (!out) throw ChannelFileError(Kind::Io, "write failed: " + path.string());
}

}  // namespace invivo
