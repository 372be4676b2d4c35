use reopen_service::commands::{Command, SeriesFormat};
use reopen_service::config::RunConfig;
use reopen_service::manifest::{replay, run, sha256_hex, write_run};

fn config(horizon: usize) -> RunConfig {
    let mut c = RunConfig {
        horizon: Some(horizon),
        ..RunConfig::default()
    };
    c.scenario.scenario = Some("open".into());
    c
}

#[test]
fn digest_is_sha256() {
    assert_eq!(
        sha256_hex(b"abc"),
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    );
}

#[test]
fn run_id_depends_only_on_inputs() {
    let cmd = Command::Simulate {
        format: SeriesFormat::Csv,
    };
    let a = run(&cmd, &config(20)).unwrap();
    let b = run(&cmd, &config(20)).unwrap();
    let c = run(&cmd, &config(21)).unwrap();
    assert_eq!(a.manifest.run_id, b.manifest.run_id);
    assert_ne!(a.manifest.run_id, c.manifest.run_id);
    assert_eq!(a.artifacts, b.artifacts);
    assert_eq!(a.manifest.outputs, b.manifest.outputs);
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir_all(&data).unwrap();
    for entry in std::fs::read_dir(reopen_core::bundled_data_dir()).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), data.join(entry.file_name())).unwrap();
    }
    let mut cfg = config(15);
    cfg.data_dir = Some(data.clone());
    let mut r = run(&Command::EpiR0, &cfg).unwrap();
    write_run(&mut r, &dir.path().join("out")).unwrap();

    let (report, _) = replay(&r.manifest).unwrap();
    assert!(report.identical);

    let params = data.join("econ_params.toml");
    let mut text = std::fs::read_to_string(&params).unwrap();
    text.push_str("\n# edited\n");
    std::fs::write(&params, text).unwrap();
    let err = replay(&r.manifest).unwrap_err();
    assert_eq!(err.kind(), reopen_core::ErrorKind::Data);
}

#[test]
fn every_command_replays() {
    let commands = [
        Command::Simulate {
            format: SeriesFormat::Json,
        },
        Command::Scenarios,
        Command::Sensitivity,
        Command::CompareIo,
        Command::EpiR0,
        Command::Synth { industries: 5 },
    ];
    let mut cfg = config(30);
    cfg.sensitivity.n_runs = 5;
    for cmd in commands {
        let r = run(&cmd, &cfg).unwrap();
        let (report, _) = replay(&r.manifest).unwrap();
        assert!(report.identical, "{}: {:?}", cmd.name(), report.mismatched);
    }
}
