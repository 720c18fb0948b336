//! Deterministic serialization: economy files in, analysis reports and
//! sweep grids out.

mod economy;
mod report;

pub use economy::{
    load_economy, write_economy, AgentSpec, EconomyFile, EconomyFormat, IoFormatError,
};
pub use report::write_report;

use crate::sweep::SweepGrid;

/// Renders a sweep grid in long format: `x,y,value` header, one row per
/// cell (row-major by y then x), empty value field for infeasible cells.
pub fn write_sweep(grid: &SweepGrid) -> String {
    let mut out = String::from("x,y,value\n");
    for (row, y) in grid.y_values.iter().enumerate() {
        for (col, x) in grid.x_values.iter().enumerate() {
            match grid.cells[row][col] {
                Some(v) => out.push_str(&format!("{x},{y},{v}\n")),
                None => out.push_str(&format!("{x},{y},\n")),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_single_cell_is_two_lines() {
        let grid = SweepGrid::new("a", "b", vec![1.0], vec![1.0], vec![vec![Some(1.0)]]).unwrap();
        assert_eq!(write_sweep(&grid), "x,y,value\n1,1,1\n");
    }

    #[test]
    fn sweep_undefined_cell_has_empty_value_field() {
        let grid = SweepGrid::new(
            "a",
            "b",
            vec![0.0, 1.0],
            vec![2.0],
            vec![vec![Some(0.25), None]],
        )
        .unwrap();
        assert_eq!(write_sweep(&grid), "x,y,value\n0,2,0.25\n1,2,\n");
    }

    #[test]
    fn sweep_rows_are_y_major() {
        let grid = SweepGrid::new(
            "a",
            "b",
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![vec![Some(1.0), Some(2.0)], vec![Some(3.0), Some(4.0)]],
        )
        .unwrap();
        let text = write_sweep(&grid);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "0,0,1");
        assert_eq!(lines[2], "1,0,2");
        assert_eq!(lines[3], "0,1,3");
        assert_eq!(lines[4], "1,1,4");
    }
}
