#ifndef RAILPLAN_MPS_HPP
#define RAILPLAN_MPS_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "railplan/milp.hpp"

namespace railplan {

class MpsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Free-format MPS. Rows are named by constraint tag, columns by variable name, and the
/// objective constant is written as the negated RHS of the objective row.
void write_mps(const MilpModel& m, std::ostream& out);
void export_mps(const MilpModel& m, const std::filesystem::path& path);

/// Reads what write_mps produces. Cost groups are not represented in MPS and come back as `other`.
MilpModel read_mps(std::istream& in);
MilpModel import_mps(const std::filesystem::path& path);

}  // namespace railplan

#endif  // RAILPLAN_MPS_HPP
