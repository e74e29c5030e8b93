#pragma once
// Network description files: [units], [servers], [flows], [windows], [analysis].

#include "netcalc/feedback.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netcalc {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

struct Units {
    std::string data = "Mb";
    std::string rate = "Mbps";
    std::string time = "ms";
    std::string reportTime = "s";
};

/// Multiplier to bits, bits per second or seconds; throws ParseError for unknown names.
Q dataUnit(const std::string& name);
Q rateUnit(const std::string& name);
Q timeUnit(const std::string& name);

enum class Method { Pmoo, Sequential, Feedback };

struct NetFile {
    Units units;
    FeedbackNetwork network;  // base tandem plus windows; curves in bits and seconds
    std::vector<std::string> serverNames;
    std::vector<std::string> windowNames;  // parallel to network.triples
    Method method = Method::Pmoo;
    std::optional<GridSpec> grid;
};

NetFile parseNetFile(const std::string& text);
/// Throws std::runtime_error when the file cannot be read.
NetFile loadNetFile(const std::string& path);

}  // namespace netcalc
