use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_residue-lab"))
        .args(args)
        .env_remove("RESIDUE_LAB_WORKERS")
        .output()
        .expect("spawn residue-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn census_rows_per_prime() {
    let o = run(&[
        "census", "--range", "3:100", "--k-max", "4", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    // 24 odd primes below 100, 2 + 4 + 8 + 16 patterns each
    assert_eq!(rows.len(), 24 * 30);
    assert!(stderr(&o).contains("max |residual|"));
}

#[test]
fn census_single_prime() {
    let o = run(&["census", "--p", "11", "--k-max", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\n11,2,++,2,"));
}

#[test]
fn census_rejects_composite() {
    let o = run(&["census", "--p", "4", "--k-max", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not prime"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        run(&["census", "--range", "3:100", "--k-max", "13"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["census"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["census", "--range", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--bound", "20000"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn burgess_hypotheses_exit_one() {
    let o = run(&[
        "charsum", "burgess", "--p", "1000003", "--n", "1000", "--r", "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "charsum", "burgess", "--p", "10000019", "--n", "1000", "--r", "9",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn burgess_example() {
    let o = run(&[
        "charsum", "burgess", "--p", "10000019", "--n", "100000", "--r", "2", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with(",true\n"));
}

#[test]
fn profile_example() {
    let o = run(&["charsum", "profile", "--p", "7", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields[0], "7");
    assert_eq!(fields[1], "2");
    assert_eq!(fields[4], "2");
}

#[test]
fn profile_sweep_satisfies_pv() {
    let o = run(&[
        "charsum", "profile", "--range", "3:10000", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 1228);
}

#[test]
fn record_p3() {
    let o = run(&["nonresidue", "record", "--p", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,p_n,p,scale,c_p\n1,2,3,0.10,19.36\n");
}

#[test]
fn table_first_ten() {
    let o = run(&[
        "nonresidue",
        "table",
        "--n-max",
        "10",
        "--search-bound",
        "100000",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let ps: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_string())
        .collect();
    assert_eq!(
        ps,
        ["3", "7", "23", "71", "311", "479", "1559", "5711", "10559", "18191"]
    );
}

#[test]
fn distribution_reports_mean() {
    let o = run(&[
        "nonresidue",
        "distribution",
        "--x",
        "100",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n,p_n,count,frequency,expected,deviation\n1,2,13,"));
    assert!(stderr(&o).contains("mean n_p"));
}

#[test]
fn verify_all_pass() {
    let o = run(&["verify", "--bound", "500", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0,pass")));
}

#[test]
fn verify_only() {
    let o = run(&[
        "verify", "--bound", "500", "--only", "gauss", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "identity,bound,cases,failures,status\ngauss,500,94,0,pass\n"
    );
    let o = run(&[
        "verify", "--only", "twin", "--bound", "2000", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn gauss_command() {
    let o = run(&["gauss", "--range", "3:200", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[\n  {\"p\":3,\"eta\":\"i\""));
}

#[test]
fn deterministic_across_workers() {
    let cases: [&[&str]; 4] = [
        &[
            "census", "--range", "3:3000", "--k-max", "5", "--format", "csv",
        ],
        &[
            "charsum", "profile", "--range", "3:20000", "--format", "json",
        ],
        &[
            "nonresidue",
            "distribution",
            "--x",
            "3000000",
            "--format",
            "csv",
        ],
        &["verify", "--bound", "300", "--format", "csv", "--seed", "7"],
    ];
    for args in cases {
        let one = run(&[args, &["--workers", "1"]].concat());
        let many = run(&[args, &["--workers", "4"]].concat());
        let env = Command::new(env!("CARGO_BIN_EXE_residue-lab"))
            .args(args)
            .env("RESIDUE_LAB_WORKERS", "3")
            .output()
            .unwrap();
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(one.stdout, many.stdout, "{args:?}");
        assert_eq!(one.stdout, env.stdout, "{args:?}");
    }
}

#[test]
fn csv_round_trips() {
    for args in [
        &[
            "census", "--range", "3:200", "--k-max", "3", "--format", "csv",
        ][..],
        &[
            "nonresidue",
            "table",
            "--n-max",
            "12",
            "--search-bound",
            "500000",
            "--format",
            "csv",
        ],
        &["charsum", "profile", "--range", "3:500", "--format", "csv"],
        &["gauss", "--range", "3:100", "--format", "csv"],
    ] {
        let text = stdout(&run(args));
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(rd.headers().unwrap()).unwrap();
        for rec in rd.records() {
            w.write_record(&rec.unwrap()).unwrap();
        }
        assert_eq!(
            String::from_utf8(w.into_inner().unwrap()).unwrap(),
            text,
            "{args:?}"
        );
    }
}

#[test]
fn out_file_defaults_to_csv() {
    let path = std::env::temp_dir().join(format!("residue-lab-{}.csv", std::process::id()));
    let o = run(&["gauss", "--p", "13", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("p,eta,re,im,abs,error\n13,1,3.60555,"));
}

#[test]
fn piped_output_defaults_to_csv() {
    let o = run(&["nonresidue", "record", "--p", "7"]);
    assert_eq!(stdout(&o), "n,p_n,p,scale,c_p\n2,3,7,1.30,2.32\n");
}
