#include "ssou/errors.hpp"

namespace ssou {

void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidInput(what);
}

}  // namespace ssou
