//! Python bindings: `import hierassoc_py`.
//!
//! Triples cross the boundary as `(row, col, value)` tuples. Library errors
//! become `ValueError`, `OverflowError` or `OSError`.

use hierassoc::bench::{run_bench as run_bench_rs, BenchConfig};
use hierassoc::stream_gen::{self, KeyFormat, StreamConfig};
use hierassoc::{tsv, AssociativeArray, CutSchedule, Error, HierarchicalArray, Triple, ValueSemiring};
use pyo3::exceptions::{PyOSError, PyOverflowError, PyValueError};
use pyo3::prelude::*;

type PyTriple = (String, String, i64);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        Error::Overflow => PyOverflowError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn triples_in(ts: Vec<PyTriple>) -> Vec<Triple> {
    ts.into_iter().map(|(r, c, v)| Triple::new(r, c, v)).collect()
}

fn triples_out(ts: &[Triple]) -> Vec<PyTriple> {
    ts.iter().map(|t| (t.row.clone(), t.col.clone(), t.val)).collect()
}

fn semiring(name: &str) -> PyResult<ValueSemiring> {
    ValueSemiring::by_name(name).ok_or_else(|| {
        let known: Vec<&str> = ValueSemiring::ALL.iter().map(|s| s.name).collect();
        PyValueError::new_err(format!("unknown semiring {name:?}; expected one of {known:?}"))
    })
}

fn schedule(cuts: Option<Vec<usize>>) -> PyResult<CutSchedule> {
    match cuts {
        None => Ok(CutSchedule::default()),
        Some(c) => CutSchedule::new(c).map_err(to_py_err),
    }
}

fn key_format(name: &str) -> PyResult<KeyFormat> {
    name.parse().map_err(to_py_err)
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Sparse integer-valued array keyed by string row and column keys.
#[pyclass(name = "AssocArray", module = "hierassoc_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyAssocArray(AssociativeArray);

#[pymethods]
impl PyAssocArray {
    #[new]
    #[pyo3(signature = (triples = Vec::new()))]
    fn new(triples: Vec<PyTriple>) -> PyResult<Self> {
        Self::from_triples(triples)
    }

    /// Builds an array, summing duplicate keys and dropping zeros.
    #[staticmethod]
    fn from_triples(triples: Vec<PyTriple>) -> PyResult<Self> {
        AssociativeArray::from_triples(&triples_in(triples)).map(Self).map_err(to_py_err)
    }

    fn nnz(&self) -> usize {
        self.0.nnz()
    }

    fn __len__(&self) -> usize {
        self.0.nnz()
    }

    fn row_keys(&self) -> Vec<String> {
        self.0.row_keys().iter().map(|k| k.to_string()).collect()
    }

    fn col_keys(&self) -> Vec<String> {
        self.0.col_keys().iter().map(|k| k.to_string()).collect()
    }

    fn get(&self, row: &str, col: &str) -> Option<i64> {
        self.0.get(row, col)
    }

    /// Entries in row-major key order.
    fn to_triples(&self) -> Vec<PyTriple> {
        triples_out(&self.0.to_triples())
    }

    #[pyo3(signature = (other, semiring = "plus_times"))]
    fn add(&self, other: &Self, semiring: &str) -> PyResult<Self> {
        self.0.ewise_add(&other.0, &self::semiring(semiring)?).map(Self).map_err(to_py_err)
    }

    /// Element-wise product over the intersection of stored entries.
    #[pyo3(signature = (other, semiring = "plus_times"))]
    fn multiply(&self, other: &Self, semiring: &str) -> PyResult<Self> {
        self.0
            .elementwise_multiply(&other.0, &self::semiring(semiring)?)
            .map(Self)
            .map_err(to_py_err)
    }

    #[pyo3(signature = (other, semiring = "plus_times"))]
    fn matmul(&self, other: &Self, semiring: &str) -> PyResult<Self> {
        self.0.semiring_matmul(&other.0, &self::semiring(semiring)?).map(Self).map_err(to_py_err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.add(other, "plus_times")
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.multiply(other, "plus_times")
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.matmul(other, "plus_times")
    }

    fn row_query(&self, row: &str) -> Self {
        Self(self.0.row_query(row))
    }

    fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    fn __repr__(&self) -> String {
        format!("AssocArray(nnz={}, rows={}, cols={})", self.0.nnz(), self.0.nrows(), self.0.ncols())
    }
}

/// Layered array absorbing batches of updates; see `CutSchedule`.
#[pyclass(name = "HierArray", module = "hierassoc_py")]
struct PyHierArray(HierarchicalArray);

#[pymethods]
impl PyHierArray {
    /// `cuts=None` uses the default schedule; `cuts=[]` is a single layer.
    #[new]
    #[pyo3(signature = (cuts = None))]
    fn new(cuts: Option<Vec<usize>>) -> PyResult<Self> {
        Ok(Self(HierarchicalArray::new(schedule(cuts)?)))
    }

    fn cuts(&self) -> Vec<usize> {
        self.0.schedule().cuts().to_vec()
    }

    fn insert_batch(&mut self, py: Python<'_>, triples: Vec<PyTriple>) -> PyResult<()> {
        let batch = triples_in(triples);
        py.detach(|| self.0.insert_batch(&batch)).map_err(to_py_err)
    }

    fn materialize(&self, py: Python<'_>) -> PyResult<PyAssocArray> {
        py.detach(|| self.0.materialize()).map(PyAssocArray).map_err(to_py_err)
    }

    fn compact(&mut self, py: Python<'_>) -> PyResult<()> {
        py.detach(|| self.0.compact()).map_err(to_py_err)
    }

    fn query_neighbors(&self, row: &str) -> PyResult<PyAssocArray> {
        self.0.query_neighbors(row).map(PyAssocArray).map_err(to_py_err)
    }

    /// `{"layer_nnz": [...], "cascades": [...], "lifetime_updates": n}`
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.0.stats())
    }

    fn layer_nnz(&self) -> Vec<usize> {
        self.0.layers().iter().map(AssociativeArray::nnz).collect()
    }

    fn __repr__(&self) -> String {
        format!("HierArray(cuts={:?}, layer_nnz={:?})", self.cuts(), self.layer_nnz())
    }
}

/// One deterministic batch of value-1 edges from a Zipf vertex stream.
#[pyfunction]
#[pyo3(signature = (batch_index, batch_size, vertex_count = 1 << 24, alpha = 1.2, seed = 0, key_format = "decimal"))]
fn gen_batch(
    py: Python<'_>,
    batch_index: usize,
    batch_size: usize,
    vertex_count: u64,
    alpha: f64,
    seed: u64,
    key_format: &str,
) -> PyResult<Vec<PyTriple>> {
    let cfg = StreamConfig {
        batch_size,
        num_batches: batch_index + 1,
        vertex_count,
        alpha,
        seed,
        key_format: self::key_format(key_format)?,
    };
    let ts = py.detach(|| stream_gen::gen_batch(&cfg, batch_index)).map_err(to_py_err)?;
    Ok(triples_out(&ts))
}

#[pyfunction]
#[pyo3(signature = (vertex_id, key_format = "decimal"))]
fn format_key(vertex_id: u64, key_format: &str) -> PyResult<String> {
    stream_gen::format_key(vertex_id, self::key_format(key_format)?).map_err(to_py_err)
}

/// Returns `(slope, expected_slope, ranks)` of the out-degree fit.
#[pyfunction]
fn degree_check(triples: Vec<PyTriple>, alpha: f64) -> PyResult<(f64, f64, usize)> {
    let fit = stream_gen::degree_check(&triples_in(triples), alpha).map_err(to_py_err)?;
    Ok((fit.slope, fit.expected_slope, fit.ranks))
}

#[pyfunction]
fn load_tsv(path: std::path::PathBuf) -> PyResult<Vec<PyTriple>> {
    tsv::load_tsv(path).map(|ts| triples_out(&ts)).map_err(to_py_err)
}

#[pyfunction]
fn save_tsv(triples: Vec<PyTriple>, path: std::path::PathBuf) -> PyResult<usize> {
    tsv::save_tsv(&triples_in(triples), path).map_err(to_py_err)
}

/// Runs the benchmark and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (
    workers = 1, entries_per_worker = 1_000_000, batch_size = 100_000, cuts = None,
    mode = "hierarchical", vertex_count = 1 << 24, alpha = 1.2, seed = 0,
    warmup_batches = 0, verify = false,
))]
#[allow(clippy::too_many_arguments)]
fn run_bench<'py>(
    py: Python<'py>,
    workers: usize,
    entries_per_worker: u64,
    batch_size: usize,
    cuts: Option<Vec<usize>>,
    mode: &str,
    vertex_count: u64,
    alpha: f64,
    seed: u64,
    warmup_batches: usize,
    verify: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = BenchConfig {
        workers,
        stream: StreamConfig {
            vertex_count,
            alpha,
            seed,
            ..StreamConfig::with_total(entries_per_worker, batch_size).map_err(to_py_err)?
        },
        schedule: schedule(cuts)?,
        mode: mode.parse().map_err(to_py_err)?,
        warmup_batches,
        verify,
        ..Default::default()
    };
    let report = py.detach(|| run_bench_rs(&cfg)).map_err(to_py_err)?;
    json_to_py(py, &report)
}

#[pymodule]
fn hierassoc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAssocArray>()?;
    m.add_class::<PyHierArray>()?;
    m.add_function(wrap_pyfunction!(gen_batch, m)?)?;
    m.add_function(wrap_pyfunction!(format_key, m)?)?;
    m.add_function(wrap_pyfunction!(degree_check, m)?)?;
    m.add_function(wrap_pyfunction!(load_tsv, m)?)?;
    m.add_function(wrap_pyfunction!(save_tsv, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    let names: Vec<&str> = ValueSemiring::ALL.iter().map(|s| s.name).collect();
    m.add("SEMIRINGS", names)?;
    m.add("DEFAULT_CUTS", hierassoc::hier::DEFAULT_CUTS.to_vec())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_conversion_round_trips() {
        let ts = vec![("a".to_owned(), "b".to_owned(), 3), ("c".to_owned(), "d".to_owned(), -1)];
        assert_eq!(triples_out(&triples_in(ts.clone())), ts);
    }

    #[test]
    fn errors_map_to_python_exception_types() {
        Python::initialize();
        Python::attach(|py| {
            let io = to_py_err(Error::Io(std::io::Error::other("boom")));
            assert!(io.is_instance_of::<PyOSError>(py));
            assert!(to_py_err(Error::Overflow).is_instance_of::<PyOverflowError>(py));
            assert!(to_py_err(Error::InvalidConfig("x".into())).is_instance_of::<PyValueError>(py));
            assert!(semiring("nope").unwrap_err().is_instance_of::<PyValueError>(py));
        });
    }

    #[test]
    fn semiring_names_resolve() {
        for sr in ValueSemiring::ALL {
            assert_eq!(semiring(sr.name).unwrap(), sr);
        }
        assert!(schedule(Some(vec![4, 2])).is_err());
        assert_eq!(schedule(None).unwrap(), CutSchedule::default());
    }
}
