use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use ndarray::Axis;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::artifacts::{data_error, open, read_json, write_json, write_rows, write_table, Layout, Provenance};
use super::config::{AreaConfig, LoadedConfig};
use super::{explain_rows, prepare_features, profile_predictions, target_data, train_on_split, PipelineError, Scope, TargetData};
use crate::analysis::{
    cross_correlation, pearson_matrix, r2_score, relative_ramp_speeds, CorrelationTable, PerformanceReport, RampSpeedTable, ScenarioPredictions,
    TechnologySeries,
};
use crate::boosting::{split_dataset, DatasetSplit, GbtModel, GbtParams, GridScore};
use crate::explain::{
    daily_profile_decomposition, dependency_data, locate_step, mean_abs_importance, shap_feature_direction, shap_interactions, top_k,
    union_of_top_k, FeatureImportance, StepFit,
};
use crate::ingest::catalog::GENERATION_TYPES;
use crate::ingest::{load_manifest_series, AreaAggregate, ColumnMetadata, FeatureFrame, OmittedRegion};
use crate::signal::io::{read_indicators, read_trace, write_indicators};
use crate::signal::{extract_indicators, nadir_occurrence_histogram, Indicator, IndicatorTable};
use crate::time::format_utc;

/// Largest tolerated |φ₀ + Σφ − f(x)| in emitted attributions.
pub const ADDITIVITY_TOLERANCE: f64 = 1e-8;
/// Largest tolerated per-hour error of the daily decomposition.
pub const DAILY_TOLERANCE: f64 = 1e-10;

/// Resolved config plus artifact layout shared by all commands.
#[derive(Debug, Clone)]
pub struct Context {
    pub loaded: LoadedConfig,
    pub layout: Layout,
}

impl Context {
    pub fn new(loaded: LoadedConfig) -> Self {
        let layout = Layout::new(&loaded.config.output_dir);
        Self { loaded, layout }
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Ok(Self::new(LoadedConfig::load(path)?))
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new(&self.loaded.sha256, self.loaded.config.seeds)
    }

    fn areas(&self, only: Option<&str>) -> Result<Vec<&AreaConfig>, PipelineError> {
        match only {
            Some(name) => Ok(vec![self.loaded.config.area(name)?]),
            None => Ok(self.loaded.config.areas.iter().collect()),
        }
    }

    fn targets(&self, only: Option<Indicator>) -> Vec<Indicator> {
        match only {
            Some(t) => vec![t],
            None => self.loaded.config.targets.clone(),
        }
    }

    fn read_indicators(&self, area: &str) -> Result<IndicatorTable, PipelineError> {
        let path = self.layout.indicators(area);
        read_indicators(open(&path)?).map_err(|e| data_error(&path, e))
    }

    fn read_features(&self, area: &str) -> Result<FeatureFrame, PipelineError> {
        let path = self.layout.features(area);
        Ok(FeatureFrame::read_csv(open(&path)?, &path.display().to_string())?)
    }
}

fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "nan".into()
    }
}

fn opt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), cell)
}

/// Lower-case ASCII file-name fragment of a feature name.
pub fn slug(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// Hourly indicators and Nadir occurrence minutes per area.
pub fn cmd_extract(ctx: &Context, area: Option<&str>) -> Result<Vec<PathBuf>, PipelineError> {
    let prov = ctx.provenance();
    let mut written = Vec::new();
    for a in ctx.areas(area)? {
        let trace = read_trace(open(&a.frequency)?).map_err(|e| data_error(&a.frequency, e))?;
        let table = extract_indicators(&trace, a.rocof_params(), ctx.loaded.config.extract)?;
        written.push(write_table(&ctx.layout.indicators(&a.name), &prov, |buf| write_indicators(&table, buf))?);
        let hist = nadir_occurrence_histogram(&trace)?;
        let rows: Vec<Vec<String>> =
            hist.density().iter().enumerate().map(|(m, d)| vec![m.to_string(), hist.counts[m].to_string(), cell(*d)]).collect();
        let header = ["minute", "count", "density"].map(String::from);
        written.push(write_rows(&ctx.layout.nadir_histogram(&a.name), &prov, &header, &rows)?);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub feature: String,
    pub included: Vec<String>,
    pub omitted: Vec<OmittedRegion>,
    pub missing_share: f64,
}

impl From<&AreaAggregate> for AggregateSummary {
    fn from(a: &AreaAggregate) -> Self {
        Self { feature: a.feature.clone(), included: a.included.clone(), omitted: a.omitted.clone(), missing_share: a.missing_share }
    }
}

/// Sidecar of a feature frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturesMeta {
    pub area: String,
    pub rows: usize,
    pub columns: Vec<ColumnMetadata>,
    /// Columns dropped for exceeding the missing-share threshold.
    pub dropped_columns: Vec<(String, f64)>,
    pub aggregates: Vec<AggregateSummary>,
    pub price_weights: BTreeMap<String, f64>,
    pub price_renormalized_hours: usize,
    pub outliers_removed: BTreeMap<String, usize>,
}

/// Area feature frames with their aggregation diagnostics.
pub fn cmd_features(ctx: &Context, area: Option<&str>) -> Result<Vec<PathBuf>, PipelineError> {
    let prov = ctx.provenance();
    let cfg = &ctx.loaded.config;
    let mut written = Vec::new();
    for a in ctx.areas(area)? {
        let raw = load_manifest_series(&a.manifest)?;
        let prepared = prepare_features(&raw, &cfg.policy, &cfg.engineer_options())?;
        written.push(write_table(&ctx.layout.features(&a.name), &prov, |buf| prepared.frame.write_csv(buf))?);
        let meta = FeaturesMeta {
            area: a.name.clone(),
            rows: prepared.frame.len(),
            columns: prepared.frame.metadata(),
            dropped_columns: prepared.dropped.clone(),
            aggregates: prepared.inputs.aggregates.iter().map(AggregateSummary::from).collect(),
            price_weights: prepared.inputs.prices.as_ref().map(|p| p.weights.clone()).unwrap_or_default(),
            price_renormalized_hours: prepared.inputs.prices.as_ref().map_or(0, |p| p.renormalized.iter().filter(|r| **r).count()),
            outliers_removed: prepared.inputs.outliers_removed.clone(),
        };
        written.push(write_json(&ctx.layout.features_meta(&a.name), &prov, &meta)?);
    }
    Ok(written)
}

/// Test-set evaluation written next to each model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub area: String,
    pub target: Indicator,
    pub scope: Scope,
    pub feature_names: Vec<String>,
    pub n_rows: usize,
    pub split: DatasetSplit,
    pub best_params: GbtParams,
    pub cv: Vec<GridScore>,
    pub rounds_used: usize,
    pub test_hours: Vec<DateTime<Utc>>,
    pub y_test: Vec<f64>,
    pub predictions: Vec<f64>,
    pub profile: Vec<f64>,
    pub test_r2: f64,
    pub profile_r2: f64,
}

fn write_model(path: &Path, prov: &Provenance, model: &GbtModel) -> Result<PathBuf, PipelineError> {
    let value: Value = serde_json::from_str(&model.to_json()?).map_err(|e| data_error(path, e))?;
    write_json(path, prov, &value)
}

pub fn read_model(path: &Path) -> Result<GbtModel, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| data_error(path, e))?;
    GbtModel::from_json(&text).map_err(|e| data_error(path, e))
}

/// Trains one model per (area, target, scope). Both scopes of a target
/// share the same row split.
pub fn cmd_train(ctx: &Context, area: Option<&str>, target: Option<Indicator>, scopes: &[Scope]) -> Result<Vec<PathBuf>, PipelineError> {
    let prov = ctx.provenance();
    let cfg = &ctx.loaded.config;
    let mut written = Vec::new();
    for a in ctx.areas(area)? {
        let frame = ctx.read_features(&a.name)?;
        let indicators = ctx.read_indicators(&a.name)?;
        for t in ctx.targets(target) {
            let full = target_data(&frame, &indicators, t, Scope::Full)?;
            let present: Vec<Option<f64>> = full.dataset.y.iter().map(|&v| Some(v)).collect();
            let split = split_dataset(&present, cfg.seeds.split)?;
            let profile = profile_predictions(&full, &split)?;
            let test_hours: Vec<DateTime<Utc>> = split.test.iter().map(|&r| full.hours[r]).collect();
            let y_test: Vec<f64> = split.test.iter().map(|&r| full.dataset.y[r]).collect();
            let profile_r2 = r2_score(&y_test, &profile)?;
            for &scope in scopes {
                let data = if scope == Scope::Full { full.clone() } else { target_data(&frame, &indicators, t, scope)? };
                let out = train_on_split(&data, split.clone(), &cfg.training, &cfg.seeds)?;
                let (name, tname, sname) = (a.name.as_str(), t.as_str(), scope.as_str());
                written.push(write_model(&ctx.layout.model(name, tname, sname), &prov, &out.model)?);
                let rows: Vec<Vec<String>> = out
                    .model
                    .meta
                    .log
                    .iter()
                    .map(|r| vec![r.round.to_string(), cell(r.train_mse), opt_cell(r.valid_mse)])
                    .collect();
                let header = ["round", "train_mse", "valid_mse"].map(String::from);
                written.push(write_rows(&ctx.layout.training_log(name, tname, sname), &prov, &header, &rows)?);
                let eval = Evaluation {
                    area: a.name.clone(),
                    target: t,
                    scope,
                    feature_names: data.dataset.feature_names.clone(),
                    n_rows: data.dataset.len(),
                    split: out.split.clone(),
                    best_params: out.model.params.clone(),
                    cv: out.cv.table.clone(),
                    rounds_used: out.model.meta.rounds_used,
                    test_hours: test_hours.clone(),
                    y_test: y_test.clone(),
                    predictions: out.test_predictions.clone(),
                    profile: profile.clone(),
                    test_r2: out.test_r2,
                    profile_r2,
                };
                written.push(write_json(&ctx.layout.evaluation(name, tname, sname), &prov, &eval)?);
            }
        }
    }
    Ok(written)
}

/// Summary of the attribution artifacts of one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainSummary {
    pub area: String,
    pub target: Indicator,
    pub mode: String,
    pub interaction_mode: String,
    pub background_size: usize,
    pub rows: usize,
    pub base_value: f64,
    pub max_additivity_error: f64,
    pub max_daily_additivity_error: f64,
    pub max_interaction_row_sum_error: f64,
    pub importance: Vec<FeatureImportance>,
    pub top_features: Vec<String>,
    pub daily_features: Vec<String>,
    /// Pair with the largest off-diagonal interaction mass and that mass
    /// per row.
    pub strongest_interaction: Option<(String, String, f64)>,
    /// Step fit of the SHAP dependency of each top feature.
    pub step_fits: BTreeMap<String, Option<StepFit>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopUnion {
    pub area: String,
    pub k: usize,
    pub targets: Vec<Indicator>,
    pub features: Vec<String>,
}

fn check_training_features(data: &TargetData, model: &GbtModel, eval: &Evaluation) -> Result<(), PipelineError> {
    if data.dataset.feature_names != model.feature_names || data.dataset.len() != eval.n_rows {
        return Err(PipelineError::Invariant(format!(
            "features of {}/{} changed since the model was trained; rerun train",
            eval.area,
            eval.target.as_str()
        )));
    }
    Ok(())
}

/// Interventional attributions, importance, dependency tables, daily
/// decomposition and path-dependent interactions of the full models. Every
/// emitted attribution is re-checked for additivity.
pub fn cmd_explain(ctx: &Context, area: Option<&str>, target: Option<Indicator>, model_path: Option<&Path>) -> Result<Vec<PathBuf>, PipelineError> {
    let prov = ctx.provenance();
    let cfg = &ctx.loaded.config;
    let mut written = Vec::new();
    for a in ctx.areas(area)? {
        let frame = ctx.read_features(&a.name)?;
        let indicators = ctx.read_indicators(&a.name)?;
        let targets = ctx.targets(target);
        let mut rankings = Vec::new();
        for &t in &targets {
            let (name, tname) = (a.name.as_str(), t.as_str());
            let path = model_path.map_or_else(|| ctx.layout.model(name, tname, Scope::Full.as_str()), Path::to_path_buf);
            let model = read_model(&path)?;
            let eval: Evaluation = read_json(&ctx.layout.evaluation(name, tname, Scope::Full.as_str()))?;
            let data = target_data(&frame, &indicators, t, Scope::Full)?;
            check_training_features(&data, &model, &eval)?;
            let split = &eval.split;
            let explained = cfg.explain.rows.select(split, data.dataset.len());
            let shap = explain_rows(&model, &data, &explained, split, cfg.explain.background_size, cfg.seeds.background)?;
            let additivity = shap.max_additivity_error();
            if !(additivity <= ADDITIVITY_TOLERANCE) {
                return Err(PipelineError::Invariant(format!("SHAP additivity error {additivity:e} for {name}/{tname}")));
            }
            let names = &shap.feature_names;
            let hours: Vec<DateTime<Utc>> = explained.iter().map(|&r| data.hours[r]).collect();

            let mut header = vec!["hour_utc".to_string(), "base_value".into(), "prediction".into()];
            header.extend(names.iter().cloned());
            let rows: Vec<Vec<String>> = (0..shap.n_rows())
                .map(|i| {
                    let mut r = vec![format_utc(hours[i]), cell(shap.base_value), cell(shap.predictions[i])];
                    r.extend(shap.values.row(i).iter().map(|v| cell(*v)));
                    r
                })
                .collect();
            written.push(write_rows(&ctx.layout.explain(name, tname, "shap", "csv"), &prov, &header, &rows)?);

            let importance = mean_abs_importance(&shap);
            let rows: Vec<Vec<String>> = importance.iter().map(|f| vec![f.rank.to_string(), f.feature.clone(), cell(f.mean_abs_shap)]).collect();
            let header = ["rank", "feature", "mean_abs_shap"].map(String::from);
            written.push(write_rows(&ctx.layout.explain(name, tname, "importance", "csv"), &prov, &header, &rows)?);

            let mut rows = Vec::new();
            for f in names {
                let rho = shap_feature_direction(&shap, f).ok();
                rows.push(vec![f.clone(), opt_cell(rho)]);
            }
            let header = ["feature", "direction"].map(String::from);
            written.push(write_rows(&ctx.layout.explain(name, tname, "directions", "csv"), &prov, &header, &rows)?);

            let hod: Vec<u32> = hours.iter().map(chrono::Timelike::hour).collect();
            let daily = daily_profile_decomposition(&shap, &hod, cfg.explain.daily_top_k)?;
            let daily_err = daily.max_additivity_error();
            if !(daily_err <= DAILY_TOLERANCE) {
                return Err(PipelineError::Invariant(format!("daily decomposition error {daily_err:e} for {name}/{tname}")));
            }
            let mut header = vec!["hour".to_string(), "rows".into(), "mean_prediction".into(), "base_value".into()];
            header.extend(daily.features.iter().cloned());
            header.push("residual".into());
            let rows: Vec<Vec<String>> = daily
                .hours
                .iter()
                .map(|h| {
                    let mut r = vec![h.hour.to_string(), h.rows.to_string(), cell(h.mean_prediction), cell(daily.base_value)];
                    r.extend(h.contributions.iter().map(|v| cell(*v)));
                    r.push(cell(h.residual));
                    r
                })
                .collect();
            written.push(write_rows(&ctx.layout.explain(name, tname, "daily", "csv"), &prov, &header, &rows)?);

            let n_inter = explained.len().min(cfg.explain.interaction_rows);
            let inter_rows = data.dataset.x.select(Axis(0), &explained[..n_inter]);
            let inter = shap_interactions(&model, inter_rows.view())?;
            let mut row_sum_err: f64 = 0.0;
            let m = names.len();
            for (i, mat) in inter.values.outer_iter().enumerate() {
                for j in 0..m {
                    let s: f64 = mat.row(j).sum();
                    row_sum_err = row_sum_err.max((s - inter.first_order[[i, j]]).abs());
                    for k in 0..j {
                        if mat[[j, k]] != mat[[k, j]] {
                            return Err(PipelineError::Invariant(format!("asymmetric interaction values for {name}/{tname}")));
                        }
                    }
                }
            }
            if !(row_sum_err <= ADDITIVITY_TOLERANCE) {
                return Err(PipelineError::Invariant(format!("interaction row sums off by {row_sum_err:e} for {name}/{tname}")));
            }
            let mass = inter.off_diagonal_mass();
            let per_row = n_inter.max(1) as f64;
            let mut header = vec!["feature".to_string()];
            header.extend(names.iter().cloned());
            let rows: Vec<Vec<String>> = (0..m)
                .map(|j| {
                    let mut r = vec![names[j].clone()];
                    r.extend((0..m).map(|k| cell(mass[[j, k]] / per_row)));
                    r
                })
                .collect();
            written.push(write_rows(&ctx.layout.explain(name, tname, "interactions", "csv"), &prov, &header, &rows)?);

            let top = top_k(&importance, cfg.explain.top_k);
            let mut step_fits = BTreeMap::new();
            for f in &top {
                let j = shap.feature_index(f)?;
                // colour by the strongest interaction partner
                let partner = (0..m).filter(|&k| k != j).max_by(|&a, &b| mass[[j, a]].total_cmp(&mass[[j, b]]).then(b.cmp(&a))).unwrap_or(j);
                let dep = dependency_data(&shap, f, &names[partner])?;
                step_fits.insert(f.clone(), locate_step(&dep.x, &dep.shap, (dep.x.len() / 20).max(5)));
                let header = [f.clone(), "shap".into(), dep.color_feature.clone()];
                let rows: Vec<Vec<String>> = (0..dep.x.len()).map(|i| vec![cell(dep.x[i]), cell(dep.shap[i]), cell(dep.color[i])]).collect();
                let what = format!("dependency_{}", slug(f));
                written.push(write_rows(&ctx.layout.explain(name, tname, &what, "csv"), &prov, &header, &rows)?);
            }

            let summary = ExplainSummary {
                area: a.name.clone(),
                target: t,
                mode: shap.mode.as_str().into(),
                interaction_mode: crate::explain::ShapMode::PathDependent.as_str().into(),
                background_size: shap.background_size.unwrap_or(0),
                rows: shap.n_rows(),
                base_value: shap.base_value,
                max_additivity_error: additivity,
                max_daily_additivity_error: daily_err,
                max_interaction_row_sum_error: row_sum_err,
                importance: importance.clone(),
                top_features: top,
                daily_features: daily.features.clone(),
                strongest_interaction: inter.strongest_pair().map(|(j, k, v)| (names[j].clone(), names[k].clone(), v / per_row)),
                step_fits,
            };
            written.push(write_json(&ctx.layout.explain(name, tname, "summary", "json"), &prov, &summary)?);
            rankings.push(importance);
        }
        if target.is_none() {
            let union = TopUnion { area: a.name.clone(), k: cfg.explain.top_k, targets: targets.clone(), features: union_of_top_k(&rankings, cfg.explain.top_k) };
            written.push(write_json(&ctx.layout.explain_dir().join(format!("{}_top_union.json", a.name)), &prov, &union)?);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub performance: PerformanceReport,
    pub ramp_speeds: BTreeMap<String, RampSpeedTable>,
}

fn read_directions(path: &Path) -> Result<BTreeMap<String, f64>, PipelineError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(open(path)?);
    let mut out = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| data_error(path, e))?;
        let v = crate::signal::io::parse_value(&record[1]).map_err(|m| data_error(path, m))?;
        if let Some(v) = v {
            out.insert(record[0].to_string(), v);
        }
    }
    Ok(out)
}

fn aligned_targets(frame: &FeatureFrame, indicators: &IndicatorTable) -> Vec<Vec<Option<f64>>> {
    let index: BTreeMap<DateTime<Utc>, usize> = indicators.hours.iter().enumerate().map(|(i, h)| (*h, i)).collect();
    Indicator::ALL
        .iter()
        .map(|&t| {
            let col = indicators.column(t);
            frame.hours.iter().map(|h| index.get(h).and_then(|&i| col[i])).collect()
        })
        .collect()
}

fn write_correlation(path: &Path, prov: &Provenance, table: &CorrelationTable) -> Result<PathBuf, PipelineError> {
    let mut header = vec!["feature".to_string()];
    header.extend(table.col_names.iter().cloned());
    let rows: Vec<Vec<String>> = table
        .row_names
        .iter()
        .zip(&table.values)
        .map(|(n, vals)| {
            let mut r = vec![n.clone()];
            r.extend(vals.iter().map(|v| opt_cell(*v)));
            r
        })
        .collect();
    write_rows(path, prov, &header, &rows)
}

/// Performance gains, ramp-speed classification and correlation tables,
/// assembled from the artifacts of earlier commands only.
pub fn cmd_report(ctx: &Context) -> Result<Vec<PathBuf>, PipelineError> {
    let prov = ctx.provenance();
    let cfg = &ctx.loaded.config;
    let mut written = Vec::new();
    let mut scenarios = Vec::new();
    let mut ramp_speeds = BTreeMap::new();
    for a in &cfg.areas {
        for &t in &cfg.targets {
            let full: Evaluation = read_json(&ctx.layout.evaluation(&a.name, t.as_str(), Scope::Full.as_str()))?;
            let da: Evaluation = read_json(&ctx.layout.evaluation(&a.name, t.as_str(), Scope::DayAhead.as_str()))?;
            if full.split != da.split || full.y_test != da.y_test {
                return Err(PipelineError::Invariant(format!("full and day-ahead models of {}/{} use different splits", a.name, t.as_str())));
            }
            scenarios.push(ScenarioPredictions {
                area: a.name.clone(),
                indicator: t.as_str().into(),
                n_train: full.split.train.len(),
                y_test: full.y_test,
                full: full.predictions,
                day_ahead: da.predictions,
                profile: full.profile,
            });
        }

        let frame = ctx.read_features(&a.name)?;
        let indicators = ctx.read_indicators(&a.name)?;
        let series: Vec<TechnologySeries> = GENERATION_TYPES
            .iter()
            .filter_map(|(g, _)| {
                let rate = *cfg.report.ramp_rates.get(*g)?;
                let col = frame.column(g)?;
                Some(TechnologySeries { name: g.to_string(), generation: col.values.clone(), ramp_rate: rate })
            })
            .collect();
        if !series.is_empty() {
            let mut table = relative_ramp_speeds(&series)?;
            if cfg.targets.contains(&Indicator::Rocof) {
                let by_ramp = read_directions(&ctx.layout.explain(&a.name, Indicator::Rocof.as_str(), "directions", "csv"))?;
                let directions: BTreeMap<String, f64> =
                    GENERATION_TYPES.iter().filter_map(|(g, r)| by_ramp.get(*r).map(|d| (g.to_string(), *d))).collect();
                table.classify(&directions, &cfg.report.thresholds);
            }
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.technology.clone(),
                        cell(r.median_ramp),
                        cell(r.ramp_rate),
                        cell(r.relative_speed),
                        opt_cell(r.direction),
                        r.role.map_or_else(String::new, |c| c.as_str().into()),
                    ]
                })
                .collect();
            let header = ["technology", "median_ramp_mw_per_h", "ramp_rate", "relative_speed", "direction", "role"].map(String::from);
            written.push(write_rows(&ctx.layout.report(&format!("{}_ramp_speeds.csv", a.name)), &prov, &header, &rows)?);
            ramp_speeds.insert(a.name.clone(), table);
        }

        let names = frame.names();
        let columns: Vec<Vec<Option<f64>>> = frame.columns.iter().map(|c| c.values.clone()).collect();
        let target_names: Vec<String> = Indicator::ALL.iter().map(|t| t.as_str().to_string()).collect();
        let cross = cross_correlation(&names, &columns, &target_names, &aligned_targets(&frame, &indicators));
        written.push(write_correlation(&ctx.layout.report(&format!("{}_target_correlation.csv", a.name)), &prov, &cross)?);
        let matrix = pearson_matrix(&names, &columns);
        written.push(write_correlation(&ctx.layout.report(&format!("{}_feature_correlation.csv", a.name)), &prov, &matrix)?);
    }

    let performance = PerformanceReport::build(&scenarios)?;
    let rows: Vec<Vec<String>> = performance
        .rows
        .iter()
        .map(|r| {
            vec![
                r.area.clone(),
                r.indicator.clone(),
                r.n_train.to_string(),
                r.n_test.to_string(),
                cell(r.r2_full),
                cell(r.r2_day_ahead),
                cell(r.r2_profile),
                opt_cell(r.gain_full_over_profile),
                opt_cell(r.gain_day_ahead_over_profile),
                opt_cell(r.gain_full_over_day_ahead),
            ]
        })
        .collect();
    let header = [
        "area",
        "indicator",
        "n_train",
        "n_test",
        "r2_full",
        "r2_day_ahead",
        "r2_profile",
        "gain_full_over_profile",
        "gain_day_ahead_over_profile",
        "gain_full_over_day_ahead",
    ]
    .map(String::from);
    written.push(write_rows(&ctx.layout.report("performance.csv"), &prov, &header, &rows)?);
    written.push(write_json(&ctx.layout.report("report.json"), &prov, &ReportFile { performance, ramp_speeds })?);
    Ok(written)
}
