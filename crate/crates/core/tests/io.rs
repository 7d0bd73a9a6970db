use delsync::harness::{read_csv, run_point, write_csv, ExperimentConfig, Variant, CSV_HEADER};
use delsync::{EcPolicy, Error};

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let rows = run_point(3000, 0.02, 1.5, &[Variant::baseline(), Variant::improved()], 4, EcPolicy::Theoretical);
    write_csv(&path, &rows).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let back = read_csv(&path).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        // The variant label is not part of the file.
        assert_eq!(a.bits_total, b.bits_total);
        assert_eq!((a.w, a.seed, a.synchronized), (b.w, b.seed, b.synchronized));
    }
}

#[test]
fn io_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope").join("x.cfg");
    match ExperimentConfig::load(&missing) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("x.cfg"), "{e}"),
        other => panic!("unexpected {other:?}"),
    }
    let bad = dir.path().join("nope").join("out.csv");
    match write_csv(&bad, &[]) {
        Err(e @ Error::Csv { .. }) => assert!(e.to_string().contains("out.csv"), "{e}"),
        other => panic!("unexpected {other:?}"),
    }
}
