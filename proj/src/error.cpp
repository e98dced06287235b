#include "hextiles/error.hpp"

namespace hextiles {

namespace {

std::string join(const std::vector<std::string>& problems)
{
    if (problems.size() == 1) {
        return problems.front();
    }
    std::string out = std::to_string(problems.size()) + " problems:";
    for (const auto& p : problems) {
        out += "\n  - " + p;
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join(problems)), problems_(std::move(problems))
{
}

}  // namespace hextiles
