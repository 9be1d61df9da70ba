//! End-to-end checks of the command-line surface: exit codes, file formats,
//! and cross-command consistency.

use std::path::Path;
use std::process::{Command, Output};

fn tripgen(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripgen"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn gen(dir: &Path, rows: usize) {
    let out = tripgen(
        &["gen-data", "--rows", &rows.to_string(), "--seed", "3", "--out", "data.csv"],
        dir,
    );
    assert!(out.status.success());
}

#[test]
fn schema_lists_18_names_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripgen(&["schema"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let names: Vec<&str> = text.lines().map(str::trim).collect();
    assert_eq!(names.len(), 18);
    assert_eq!(names[0], "hh_veh_0");
    assert_eq!(names[16], "person_trips");
    assert_eq!(names[17], "vehicle_trips");
}

#[test]
fn gen_data_line_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripgen(
        &["gen-data", "--rows", "100", "--seed", "7", "--out", "a.csv", "--show-truth"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("person_trips = "));
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a.lines().count(), 101);
    let out = tripgen(
        &["gen-data", "--rows", "100", "--seed", "7", "--out", "b.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn train_writes_model_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 300);
    let out = tripgen(
        &[
            "train", "--data", "data.csv", "--target", "person_trips", "--epochs", "4",
            "--model-out", "model.json", "--curve-out", "curve.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("validation mape="));
    let curve = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,val_loss");
    assert_eq!(lines.len(), 5); // header + one line per epoch
    assert!(dir.path().join("model.json").exists());
}

#[test]
fn train_bad_split_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 50);
    let out = tripgen(
        &[
            "train", "--data", "data.csv", "--target", "person_trips",
            "--split", "0.5,0.6,0.1", "--model-out", "m.json", "--curve-out", "c.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum to 1"));
}

#[test]
fn tune_malformed_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 50);
    let out = tripgen(
        &["tune", "--data", "data.csv", "--target", "person_trips", "--grid", "bogus"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("batch"));
}

#[test]
fn tune_single_cell_grid() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 80);
    let out = tripgen(
        &[
            "tune", "--data", "data.csv", "--target", "person_trips",
            "--grid", "batch=10;epochs=2", "--folds", "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("batch,epochs,mean_cv_mse"));
    assert!(text.trim_end().ends_with("best: batch=10 epochs=2"));
}

#[test]
fn evaluate_and_predict_agree() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 300);
    let out = tripgen(
        &[
            "train", "--data", "data.csv", "--target", "person_trips", "--epochs", "3",
            "--model-out", "model.json", "--curve-out", "curve.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = tripgen(
        &["evaluate", "--model", "model.json", "--data", "data.csv", "--pairs-out", "pairs.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("mape="));
    let out = tripgen(
        &["predict", "--model", "model.json", "--input", "data.csv", "--out", "pred.csv"],
        dir.path(),
    );
    assert!(out.status.success());

    let pairs = std::fs::read_to_string(dir.path().join("pairs.csv")).unwrap();
    let preds = std::fs::read_to_string(dir.path().join("pred.csv")).unwrap();
    let pair_lines: Vec<&str> = pairs.lines().skip(1).collect();
    let pred_lines: Vec<&str> = preds.lines().skip(1).collect();
    assert_eq!(pair_lines.len(), 300);
    assert_eq!(pred_lines.len(), 300);
    for (pair, pred) in pair_lines.iter().zip(&pred_lines) {
        let predicted_from_eval = pair.rsplit(',').next().unwrap();
        let predicted = pred.rsplit(',').next().unwrap();
        assert_eq!(predicted_from_eval, predicted);
    }
}

#[test]
fn predict_accepts_input_without_targets() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 100);
    let out = tripgen(
        &[
            "train", "--data", "data.csv", "--target", "person_trips", "--epochs", "2",
            "--model-out", "model.json", "--curve-out", "curve.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());

    // Strip the two target columns from the CSV.
    let full = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    let stripped: String = full
        .lines()
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            cells[..16].join(",")
        })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(dir.path().join("features.csv"), stripped).unwrap();

    let out = tripgen(
        &["predict", "--model", "model.json", "--input", "features.csv", "--out", "pred.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let preds = std::fs::read_to_string(dir.path().join("pred.csv")).unwrap();
    assert_eq!(preds.lines().count(), 101);
    assert_eq!(preds.lines().next().unwrap(), "index,predicted");
}

#[test]
fn evaluate_schema_mismatch_exits_2_naming_column() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 60);
    let out = tripgen(
        &[
            "train", "--data", "data.csv", "--target", "person_trips", "--epochs", "2",
            "--model-out", "model.json", "--curve-out", "curve.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    std::fs::write(dir.path().join("bad.csv"), "a,b\n1,2\n").unwrap();
    let out = tripgen(
        &["evaluate", "--model", "model.json", "--data", "bad.csv", "--pairs-out", "p.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hh_veh_0"));
}

#[test]
fn missing_input_file_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripgen(
        &["evaluate", "--model", "absent.json", "--data", "absent.csv", "--pairs-out", "p.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripgen(
        &["gen-data", "--rows", "5", "--out", "no_such_dir/out.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn version_mentions_model_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = tripgen(&["--version"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("model schema 1"));
}

#[test]
fn scaler_fit_on_train_split_only() {
    // Corrupting rows that land in the test split must not change the model.
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 200);
    let train_args = [
        "train", "--data", "data.csv", "--target", "person_trips", "--epochs", "3",
        "--seed", "5", "--model-out", "model.json", "--curve-out", "curve.csv",
    ];
    let out = tripgen(&train_args, dir.path());
    assert!(out.status.success());
    let baseline = std::fs::read_to_string(dir.path().join("model.json")).unwrap();

    // Recover which rows went to the test split by replaying the seeded
    // permutation, then plant outliers there.
    let text = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let n = lines.len() - 1;
    let mut order: Vec<usize> = (0..n).collect();
    tripgen::numerics::Rng::new(5).shuffle(&mut order);
    let test_n = (n as f64 * 0.1).floor() as usize;
    for &row in &order[n - test_n..] {
        let cells: Vec<String> = lines[row + 1]
            .split(',')
            .enumerate()
            .map(|(i, c)| if i < 16 { "9999".to_string() } else { c.to_string() })
            .collect();
        lines[row + 1] = cells.join(",");
    }
    std::fs::write(dir.path().join("data.csv"), lines.join("\n") + "\n").unwrap();

    let out = tripgen(&train_args, dir.path());
    assert!(out.status.success());
    let outliers = std::fs::read_to_string(dir.path().join("model.json")).unwrap();
    assert_eq!(baseline, outliers);
}
