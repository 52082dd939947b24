#include <cstdio>
#include <filesystem>
#include <iostream>

#include "cli.hpp"
#include "fracfast/errors.hpp"

namespace {

void print_table(const fracfast::Table& t, const std::string& dir) {
  std::cout << "# " << (std::filesystem::path(dir) / t.file).string() << '\n';
  if (t.rows.size() > 50) {
    std::cout << "(" << t.rows.size() << " rows)\n";
    return;
  }
  for (size_t i = 0; i < t.columns.size(); ++i) std::cout << (i ? "," : "") << t.columns[i];
  std::cout << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const auto inv = fracbench::parse_arguments(std::vector<std::string>(argv + 1, argv + argc));
    if (inv.help) {
      std::cout << inv.help_text;
      return 0;
    }
    const auto report = fracfast::run_experiment(inv.config);
    for (const auto& t : report.results) {
      fracfast::write_table(inv.out_dir, t);
      print_table(t, inv.out_dir);
    }
    for (const auto& t : report.timings) {
      fracfast::write_table(inv.out_dir, t);
      print_table(t, inv.out_dir);
    }
    return 0;
  } catch (const fracbench::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const fracfast::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const fracfast::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
