//! Pretty text for Lewis diagrams and dimension tables.

use c2alg::abelian::format_invariants;
use c2alg::mackey::MackeyFunctor;
use c2alg::matrix::IntMatrix;
use c2alg::trace::DimTable;

use crate::schema::canonical;

/// `[]`, `[2]`, `[1 0; 0 1]`.
pub fn render_matrix(m: &IntMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

/// Two-row diagram followed by the structure maps.
pub fn render_lewis(m: &MackeyFunctor) -> String {
    let m = canonical(m);
    format!(
        "{}\nres = {}\ntr = {}\nsigma = {}\n",
        m,
        render_matrix(m.res()),
        render_matrix(m.tr()),
        render_matrix(m.sigma())
    )
}

/// One-line form used inside tables.
pub fn render_lewis_inline(m: &MackeyFunctor) -> String {
    let m = canonical(m);
    if m.is_zero() {
        return "0".to_string();
    }
    format!(
        "{}  (res {}, tr {}, sigma {})",
        m,
        render_matrix(m.res()),
        render_matrix(m.tr()),
        render_matrix(m.sigma())
    )
}

pub fn weight_label(w: Option<u32>) -> String {
    match w {
        Some(w) => w.to_string(),
        None => "all".to_string(),
    }
}

/// Columns n = 0..=n_max, one row per (label, table) and nonzero weight, then
/// totals.
pub fn render_dim_tables(tables: &[(&str, &DimTable)], n_max: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..=n_max).map(|n| format!("n={}", n)).collect();
    out.push_str(&format!("{:<8}{:<8}{}\n", "table", "weight", header.join(" ")));
    for (label, table) in tables {
        for (w, dims) in table.iter().filter(|(w, d)| *w == Some(0) || d.iter().any(|&x| x > 0)) {
            out.push_str(&format!("{:<8}{:<8}{}\n", label, weight_label(*w), row(dims, n_max)));
        }
        let totals: Vec<usize> = (0..=n_max).map(|n| c2alg::trace::total_dim(table, n)).collect();
        out.push_str(&format!("{:<8}{:<8}{}\n", label, "total", row(&totals, n_max)));
    }
    out
}

fn row(dims: &[usize], n_max: usize) -> String {
    (0..=n_max)
        .map(|n| format!("{:<w$}", dims.get(n).copied().unwrap_or(0), w = format!("n={}", n).len()))
        .collect::<Vec<_>>()
        .join(" ")
        .trim_end()
        .to_string()
}

pub fn render_group(ds: &[c2alg::Integer]) -> String {
    format_invariants(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lewis_examples() {
        assert_eq!(render_lewis(&MackeyFunctor::constant_z()), "Z / Z\nres = [1]\ntr = [2]\nsigma = [1]\n");
        assert_eq!(render_lewis(&MackeyFunctor::z_minus()), "0 / Z\nres = []\ntr = []\nsigma = [-1]\n");
        assert!(render_lewis(&MackeyFunctor::zero()).starts_with("0 / 0\n"));
    }

    #[test]
    fn matrices() {
        assert_eq!(render_matrix(&IntMatrix::from_i64(&[&[1, 0], &[0, 1]])), "[1 0; 0 1]");
        assert_eq!(render_matrix(&IntMatrix::zeros(0, 3)), "[]");
    }
}
