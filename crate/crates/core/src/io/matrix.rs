//! Distance matrix CSV: a header cell `distance_mi` followed by node ids,
//! then one row per node led by its id. Miles, symmetric, zero diagonal.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::DistanceMatrix;

const CORNER: &str = "distance_mi";
const SYMMETRY_TOL: f64 = 1e-9;

pub fn read_matrix_csv(reader: impl Read) -> Result<DistanceMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Matrix("empty file".into()))?
        .map_err(|e| Error::Matrix(e.to_string()))?;
    if header.get(0) != Some(CORNER) {
        return Err(Error::Matrix(format!("header must start with `{CORNER}`")));
    }
    let ids: Vec<usize> = header
        .iter()
        .skip(1)
        .map(|s| s.parse().map_err(|_| Error::Matrix(format!("bad node id `{s}` in header"))))
        .collect::<Result<_>>()?;
    if ids.iter().enumerate().any(|(i, &id)| i != id) {
        return Err(Error::Matrix("header ids must be 0, 1, ..., n in order".into()));
    }
    let n = ids.len();
    let mut rows = Vec::with_capacity(n);
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Matrix(e.to_string()))?;
        let line = i + 2;
        if rec.get(0).and_then(|s| s.parse::<usize>().ok()) != Some(i) {
            return Err(Error::Matrix(format!("line {line}: row label must be {i}")));
        }
        if rec.len() != n + 1 {
            return Err(Error::Matrix(format!("line {line}: expected {} cells, found {}", n + 1, rec.len())));
        }
        let row: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|_| Error::Matrix(format!("line {line}: bad number `{s}`"))))
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Matrix(format!("expected {n} rows, found {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        for (j, &d) in r.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::Matrix(format!("entry ({i}, {j}) must be finite and non-negative")));
            }
            if i == j && d != 0.0 {
                return Err(Error::Matrix(format!("diagonal entry ({i}, {i}) must be zero")));
            }
        }
    }
    let m = DistanceMatrix::from_rows(rows)?;
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::Matrix(format!("matrix is asymmetric (max |d_ij - d_ji| = {asym})")));
    }
    Ok(m)
}

pub fn write_matrix_csv(m: &DistanceMatrix, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Matrix(e.to_string());
    let mut header = vec![CORNER.to_string()];
    header.extend((0..m.size()).map(|i| i.to_string()));
    w.write_record(&header).map_err(err)?;
    for (i, row) in m.rows().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|d| d.to_string()));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Matrix(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 1.5, 2.25], vec![1.5, 0.0, 0.1], vec![2.25, 0.1, 0.0]]).unwrap();
        let mut buf = Vec::new();
        write_matrix_csv(&m, &mut buf).unwrap();
        assert!(buf.starts_with(b"distance_mi,0,1,2\n"));
        assert_eq!(read_matrix_csv(&buf[..]).unwrap(), m);
    }

    #[test]
    fn rejects_bad_files() {
        let asym = "distance_mi,0,1\n0,0,2\n1,3,0\n";
        assert!(matches!(read_matrix_csv(asym.as_bytes()), Err(Error::Matrix(m)) if m.contains("asymmetric")));
        let short = "distance_mi,0,1\n0,0,2\n";
        assert!(read_matrix_csv(short.as_bytes()).is_err());
        let diag = "distance_mi,0,1\n0,1,2\n1,2,0\n";
        assert!(read_matrix_csv(diag.as_bytes()).is_err());
        let corner = "d,0,1\n0,0,2\n1,2,0\n";
        assert!(read_matrix_csv(corner.as_bytes()).is_err());
    }
}
