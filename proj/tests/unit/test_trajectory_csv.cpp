#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "hlab/trajectory_csv.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

Point p1(double a) { return Point::Constant(1, a); }

Trajectory scalar_run(std::size_t n) {
  SchemeConfig c;
  c.kind = SchemeKind::basic;
  c.horizon = n;
  c.x0 = p1(1.0);
  c.schedules.beta = Schedule::constant(0.5);
  c.forcing = ExternalForcing{[](std::size_t k) { return p1(0.1 * k); }};
  return run(c).main;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(TrajectoryCsv, HeaderAndRowCount) {
  const auto rows = lines_of(trajectory_csv(scalar_run(10)));
  ASSERT_EQ(rows.size(), 12u);  // header + 11 iterates
  EXPECT_EQ(rows[0], "k,x_1,z_1,e_1,ell,phi_term,alpha,beta,gamma,delta,epsilon,residual");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(split(rows[i]).size(), 12u) << rows[i];
}

TEST(TrajectoryCsv, LastRowHasEmptyStepCells) {
  const auto rows = lines_of(trajectory_csv(scalar_run(3)));
  const auto last = split(rows.back());
  EXPECT_EQ(last[0], "3");
  EXPECT_FALSE(last[1].empty());
  for (std::size_t i = 2; i < last.size(); ++i) EXPECT_TRUE(last[i].empty()) << i;
  // ell is defined for k < n - 1 only
  EXPECT_TRUE(split(rows[3])[4].empty());
  EXPECT_FALSE(split(rows[2])[4].empty());
}

TEST(TrajectoryCsv, RoundTripsDoubles) {
  const Trajectory t = scalar_run(20);
  const auto rows = lines_of(trajectory_csv(t));
  for (std::size_t k = 0; k <= 20; ++k) EXPECT_EQ(std::stod(split(rows[k + 1])[1]), t.x[k][0]);
}

TEST(TrajectoryCsv, VectorSchemeLeavesEllEmpty) {
  SchemeConfig c;
  c.kind = SchemeKind::halpern;
  c.horizon = 4;
  c.x0 = Point::Zero(2);
  c.schedules.beta = Schedule::constant(0.5);
  c.P = LipschitzMap::identity(2);
  const auto rows = lines_of(trajectory_csv(run(c).main));
  EXPECT_EQ(rows[0].substr(0, 24), "k,x_1,x_2,z_1,z_2,e_1,e_");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_TRUE(split(rows[i])[7].empty());
}

TEST(TrajectoryCsv, FileWriteIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "hlab_csv_test";
  std::filesystem::create_directories(dir);
  const Trajectory t = scalar_run(50);
  write_trajectory_csv_file(t, dir / "a.csv");
  write_trajectory_csv_file(scalar_run(50), dir / "b.csv");
  const std::string a = oracle::slurp(dir / "a.csv");
  EXPECT_EQ(a, oracle::slurp(dir / "b.csv"));
  EXPECT_EQ(a, trajectory_csv(t));
  EXPECT_FALSE(std::filesystem::exists(dir / "a.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(TrajectoryCsv, UnwritableThrows) {
  EXPECT_THROW(write_trajectory_csv_file(scalar_run(2), "/nonexistent_dir_hlab/x.csv"), std::runtime_error);
}
