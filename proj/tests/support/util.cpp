#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "dowlab/text.hpp"
#include "testsupport.hpp"

namespace testsupport {

namespace {

bool starts_with(const std::string& s, std::size_t at, const char* prefix) {
  return s.compare(at, std::char_traits<char>::length(prefix), prefix) == 0;
}

}  // namespace

std::optional<std::string> xml_error(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto fail = [&](const std::string& msg) { return msg + " near offset " + std::to_string(i); };

  while (i < n) {
    char c = text[i];
    if (c != '<') {
      if (c == '&') {
        static const char* entities[] = {"&amp;", "&lt;", "&gt;", "&quot;", "&apos;", "&#"};
        bool ok = false;
        for (const char* e : entities)
          if (starts_with(text, i, e)) ok = true;
        if (!ok) return fail("bare '&'");
      }
      ++i;
      continue;
    }
    if (starts_with(text, i, "<?")) {
      auto end = text.find("?>", i);
      if (end == std::string::npos) return fail("unterminated processing instruction");
      i = end + 2;
      continue;
    }
    if (starts_with(text, i, "<!--")) {
      auto end = text.find("-->", i);
      if (end == std::string::npos) return fail("unterminated comment");
      i = end + 3;
      continue;
    }
    if (starts_with(text, i, "</")) {
      auto end = text.find('>', i);
      if (end == std::string::npos) return fail("unterminated closing tag");
      std::string name = dowlab::trim(text.substr(i + 2, end - i - 2));
      if (stack.empty()) return fail("closing tag '" + name + "' with nothing open");
      if (stack.back() != name)
        return fail("closing tag '" + name + "' does not match open '" + stack.back() + "'");
      stack.pop_back();
      i = end + 1;
      continue;
    }
    // Opening or self-closing tag.
    std::size_t j = i + 1;
    while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == ':' ||
                     text[j] == '-' || text[j] == '_'))
      ++j;
    if (j == i + 1) return fail("'<' not followed by a tag name");
    std::string name = text.substr(i + 1, j - i - 1);
    // Attributes.
    while (true) {
      while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j >= n) return fail("unterminated tag '" + name + "'");
      if (text[j] == '>') {
        stack.push_back(name);
        ++j;
        break;
      }
      if (starts_with(text, j, "/>")) {
        j += 2;
        break;
      }
      std::size_t eq = j;
      while (eq < n && text[eq] != '=' && text[eq] != '>' && !std::isspace(static_cast<unsigned char>(text[eq])))
        ++eq;
      if (eq >= n || text[eq] != '=') return fail("attribute in '" + name + "' lacks '='");
      if (eq + 1 >= n || (text[eq + 1] != '"' && text[eq + 1] != '\''))
        return fail("attribute value in '" + name + "' is not quoted");
      char quote = text[eq + 1];
      auto endq = text.find(quote, eq + 2);
      if (endq == std::string::npos) return fail("unterminated attribute value in '" + name + "'");
      j = endq + 1;
    }
    i = j;
  }
  if (!stack.empty()) return "unclosed tag '" + stack.back() + "' at end of document";
  return std::nullopt;
}

std::string make_temp_dir(const std::string& hint) {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / ("dowlab_" + hint + "_XXXXXX")).string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed for " + tmpl);
  return std::string(buf.data());
}

std::map<std::string, std::string> read_dir_bytes(const std::string& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto rel = std::filesystem::path(entry.path()).lexically_relative(dir).string();
    files[rel] = dowlab::read_file(entry.path().string());
  }
  return files;
}

}  // namespace testsupport
