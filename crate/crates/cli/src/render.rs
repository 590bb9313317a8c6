//! Plain-text table rendering. Numbers print through `Display`, whose
//! shortest round-trip form carries full f64 precision, so every figure in
//! a table also appears losslessly in the JSON output built from the same
//! report struct.

use cutspectra::SymMatrix;

pub fn matrix_block(label: &str, m: &SymMatrix) -> String {
    let n = m.n();
    let cells: Vec<Vec<String>> =
        (0..n).map(|i| (0..n).map(|j| format!("{}", m.get(i, j))).collect()).collect();
    let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
    let mut out = format!("{label} ({n} x {n}):\n");
    for row in cells {
        let padded: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
        out.push_str("  ");
        out.push_str(&padded.join(" "));
        out.push('\n');
    }
    out
}

pub fn float_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" ")
}

pub fn id_set(ids: &[usize]) -> String {
    let inner: Vec<String> = ids.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
