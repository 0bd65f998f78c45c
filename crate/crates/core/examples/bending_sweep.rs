//! Small sweep of the bump strength at fixed width, written as CSV to stdout.

use dnstrip::geometry::ProfileSpec;
use dnstrip::scenario::{preset, run_sweep, write_sweep_csv, Length, SweepGrid};

fn main() -> dnstrip::Result<()> {
    let mut sc = preset("prop1_bend")?;
    sc.geometry.profile = ProfileSpec::PolyBump { c: 0.3, s0: 2.0 };
    sc.truncation.half_length = Length::Fixed(10.0);
    sc.grid.ns = 160;
    sc.grid.nu = 16;
    sc.sweep = Some(SweepGrid {
        c: vec![-0.4, -0.2, 0.1, 0.2, 0.4],
        d: vec![1.0],
        s0: vec![2.0],
    });
    let rows = run_sweep(&sc)?;
    write_sweep_csv(&rows, std::io::stdout())
}
