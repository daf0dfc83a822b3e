use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wbpose::actions::{classify_actions as classify_spans, detect_manipulation_contacts, ActionsFile};
use wbpose::motion_model::{parse_motion, parse_scene};
use wbpose::posegraph::{build_graph, stats, to_dot as render_dot, DotOptions};
use wbpose::segmentation::{run_pipeline, PipelineConfig, SegmentReport};
use wbpose::signal::{self, FilterSpec};
use wbpose::taxonomy::{TaxonomyFile, TaxonomyGraph};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// The support pose taxonomy.
#[pyclass(name = "Taxonomy", frozen)]
struct PyTaxonomy {
    graph: TaxonomyGraph,
}

#[pymethods]
impl PyTaxonomy {
    /// Built-in table, or the JSON text `source` when given.
    #[new]
    #[pyo3(signature = (source=None))]
    fn new(source: Option<&str>) -> PyResult<Self> {
        let graph = match source {
            Some(s) => TaxonomyGraph::load(s).map_err(err)?,
            None => TaxonomyGraph::builtin().clone(),
        };
        Ok(PyTaxonomy { graph })
    }

    fn __len__(&self) -> usize {
        self.graph.len()
    }

    fn class_ids(&self) -> Vec<String> {
        self.graph.classes().map(|c| c.id.to_string()).collect()
    }

    /// Class id of a spec such as "Leg:Foot,Arm:Hold".
    fn classify(&self, supports: &str) -> PyResult<String> {
        let spec = supports.parse().map_err(err)?;
        Ok(self.graph.classify(&spec).map_err(err)?.to_string())
    }

    fn neighbors(&self, id: &str) -> PyResult<Vec<String>> {
        Ok(self.graph.neighbors(id).map_err(err)?.iter().map(|c| c.to_string()).collect())
    }

    fn transition_path(&self, source: &str, target: &str) -> PyResult<Vec<String>> {
        let path = self.graph.transition_path(source, target).map_err(err)?;
        Ok(path.iter().map(|c| c.to_string()).collect())
    }

    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Summary line such as "46 classes, 0 violations".
    fn validate(&self) -> String {
        self.graph.validate().to_string()
    }

    fn to_json(&self) -> String {
        TaxonomyFile::from_graph(&self.graph).to_json()
    }
}

#[pyfunction]
#[pyo3(signature = (x, frame_rate, cutoff_hz=signal::DEFAULT_CUTOFF_HZ))]
fn lowpass(x: Vec<f64>, frame_rate: f64, cutoff_hz: f64) -> PyResult<Vec<f64>> {
    signal::lowpass_scalar(&x, frame_rate, &FilterSpec::new(cutoff_hz)).map_err(err)
}

#[pyfunction]
fn differentiate(positions: Vec<[f64; 3]>, frame_rate: f64) -> PyResult<Vec<[f64; 3]>> {
    signal::differentiate(&positions, frame_rate).map_err(err)
}

/// Filtered speed of a 3D trajectory.
#[pyfunction]
#[pyo3(signature = (positions, frame_rate, cutoff_hz=signal::DEFAULT_CUTOFF_HZ))]
fn speed(positions: Vec<[f64; 3]>, frame_rate: f64, cutoff_hz: f64) -> PyResult<Vec<f64>> {
    signal::speed_of(&positions, frame_rate, &FilterSpec::new(cutoff_hz)).map_err(err)
}

/// Segments a motion; takes and returns JSON text.
#[pyfunction]
#[pyo3(signature = (motion, scene, cutoff_hz=None, threshold=None, contact_eps=None, min_frames=None))]
fn segment(
    motion: &str,
    scene: &str,
    cutoff_hz: Option<f64>,
    threshold: Option<f64>,
    contact_eps: Option<f64>,
    min_frames: Option<usize>,
) -> PyResult<String> {
    let d = PipelineConfig::default();
    let config = PipelineConfig {
        cutoff_hz: cutoff_hz.unwrap_or(d.cutoff_hz),
        speed_threshold: threshold.unwrap_or(d.speed_threshold),
        contact_epsilon: contact_eps.unwrap_or(d.contact_epsilon),
        min_segment_frames: min_frames.unwrap_or(d.min_segment_frames),
    };
    let motion = parse_motion(motion).map_err(err)?;
    let scene = parse_scene(scene).map_err(err)?;
    let report = run_pipeline(&motion, &scene, &config, TaxonomyGraph::builtin()).map_err(err)?;
    Ok(report.to_json())
}

#[pyfunction]
fn to_dot(report: &str) -> PyResult<String> {
    let report = SegmentReport::from_json(report).map_err(err)?;
    Ok(render_dot(&build_graph(&report).map_err(err)?, &DotOptions::default()))
}

/// Visit counts, step count and compliance as JSON.
#[pyfunction]
fn graph_stats(report: &str) -> PyResult<String> {
    let report = SegmentReport::from_json(report).map_err(err)?;
    let graph = build_graph(&report).map_err(err)?;
    serde_json::to_string(&stats(&graph, TaxonomyGraph::builtin())).map_err(err)
}

#[pyfunction]
fn classify_actions(report: &str, motion: &str, scene: &str) -> PyResult<String> {
    let report = SegmentReport::from_json(report).map_err(err)?;
    let motion = parse_motion(motion).map_err(err)?;
    let scene = parse_scene(scene).map_err(err)?;
    let contacts = detect_manipulation_contacts(&motion, &scene, &report.config).map_err(err)?;
    let spans = classify_spans(&report, &contacts);
    Ok(ActionsFile { contacts, spans }.to_json())
}

#[pymodule]
#[pyo3(name = "wbpose")]
fn wbpose_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTaxonomy>()?;
    m.add_function(wrap_pyfunction!(lowpass, m)?)?;
    m.add_function(wrap_pyfunction!(differentiate, m)?)?;
    m.add_function(wrap_pyfunction!(speed, m)?)?;
    m.add_function(wrap_pyfunction!(segment, m)?)?;
    m.add_function(wrap_pyfunction!(to_dot, m)?)?;
    m.add_function(wrap_pyfunction!(graph_stats, m)?)?;
    m.add_function(wrap_pyfunction!(classify_actions, m)?)?;
    Ok(())
}
