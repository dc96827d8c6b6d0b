//! Runs the geometric inequality suites on a coarse grid.

use pcf::lemmas::{all_suites, LemmaGrid};

fn main() -> pcf::Result<()> {
    let grid = LemmaGrid { r_count: 201, ..LemmaGrid::default() };
    for s in all_suites(&grid)? {
        println!("{} ({} samples): {}", s.name, s.samples, if s.passed() { "pass" } else { "FAIL" });
        for c in &s.clauses {
            println!("  {:<24} margin {:+.3e}", c.clause, c.min_margin);
        }
    }
    Ok(())
}
