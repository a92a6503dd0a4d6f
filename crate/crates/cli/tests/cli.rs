use std::path::PathBuf;
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::Request;
use cagame::render::parse_pbm;
use cagame::{Background, Move, Outcome, Params, PathVerdict, Position, TakeAway};
use cagame_cli::api::{self, PositionDoc};
use cagame_cli::play::{play, Side};
use cagame_cli::service::router;
use cagame_cli::{Limits, SpecDocument};
use http_body_util::BodyExt;
use proptest::prelude::*;
use serde_json::{json, Value};
use tower::ServiceExt;

const RULE110: &[&str] = &[
    "--gamma",
    "1",
    "--Gamma",
    "0",
    "--left",
    "0",
    "--center",
    "11010011101100",
    "--right",
    "0",
];

fn cagame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cagame"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn with(base: &[&str], rest: &[&str]) -> Vec<String> {
    base.iter().chain(rest).map(|s| s.to_string()).collect()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn solve_prints_outcome() {
    let o = cagame(&["solve", "--X", "4", "--Y", "5", "--mp", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P\n");

    let args = with(
        RULE110,
        &["solve", "--X", "6", "--Y", "2", "--mp", "4", "--best-move"],
    );
    let o = cagame(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "N\nt=6,m=2\n");
}

#[test]
fn verify_thm2_on_rule60() {
    let o = cagame(&[
        "verify-thm2",
        "--xmax",
        "40",
        "--ymax",
        "12",
        "--mpmax",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with(", 0 mismatches\n"), "{}", stdout(&o));
}

#[test]
fn verify_thm3_on_rule110() {
    let o = cagame(&[
        "--gamma",
        "1",
        "verify-thm3",
        "--xmin",
        "-5",
        "--xmax",
        "20",
        "--ymax",
        "8",
        "--hmax",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn spec_file_and_inline_flags_agree() {
    let path = tmp("rule110.json");
    std::fs::write(
        &path,
        r#"{"gamma":1,"Gamma":0,"L":"0","C":"11010011101100","R":"0","xi":0}"#,
    )
    .unwrap();
    let from_file = cagame(&[
        "--spec",
        path.to_str().unwrap(),
        "solve",
        "--X",
        "6",
        "--Y",
        "2",
        "--mp",
        "3",
    ]);
    let args = with(RULE110, &["solve", "--X", "6", "--Y", "2", "--mp", "3"]);
    let inline = cagame(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(stdout(&from_file), "P\n");
    assert_eq!(stdout(&from_file), stdout(&inline));
}

#[test]
fn exit_codes() {
    let o = cagame(&[
        "--center", "102", "solve", "--X", "1", "--Y", "1", "--mp", "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = cagame(&["--left", "", "solve", "--X", "1", "--Y", "1", "--mp", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cagame(&["solve", "--X", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cagame(&[
        "--state-budget",
        "100",
        "solve",
        "--X",
        "40",
        "--Y",
        "12",
        "--mp",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource-limit"));
    let o = cagame(&[
        "--cell-budget",
        "1000",
        "evolve",
        "--x0",
        "0",
        "--x1",
        "999",
        "--rows",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = cagame(&[
        "path-check",
        "--X",
        "2",
        "--Y",
        "1",
        "--mp",
        "2",
        "--path",
        "1,1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "failure at move 0: illegal-move:black-token\n");
    let o = cagame(&[
        "path-check",
        "--X",
        "2",
        "--Y",
        "1",
        "--mp",
        "2",
        "--path",
        "2,1",
    ]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(0), "optimal\n")
    );
    let o = cagame(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn pbm_file_round_trips() {
    let path = tmp("feps.pbm");
    let o = cagame(&[
        "--gamma",
        "1",
        "--Gamma",
        "2",
        "evolve",
        "--x0",
        "-40",
        "--x1",
        "39",
        "--rows",
        "50",
        "--format",
        "pbm",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bitmap = parse_pbm(&std::fs::read(&path).unwrap()).unwrap();
    let window = cagame::CaSystem::new(Params::new(1, 2), Background::step())
        .evolve_window(-40, 39, 50)
        .unwrap();
    assert_eq!(bitmap.into_window(-40), window);
}

#[test]
fn text_render_orientation() {
    let o = cagame(&["evolve", "--x0", "-1", "--x1", "3", "--rows", "2"]);
    assert_eq!(stdout(&o), "..##.\n..#..\n..###\n");
}

#[test]
fn analysis_subcommands() {
    let o = cagame(&[
        "--right",
        "0",
        "periodicity",
        "--dmax",
        "2",
        "--rmax",
        "2",
        "--window",
        "12",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("periodic: drift 0, period 1"),
        "{}",
        stdout(&o)
    );

    let zeros = tmp("zeros.json");
    std::fs::write(
        &zeros,
        r#"{"gamma":0,"Gamma":0,"L":"0","C":"","R":"0","xi":0}"#,
    )
    .unwrap();
    let o = cagame(&[
        "converge",
        "--spec2",
        zeros.to_str().unwrap(),
        "--yfrom",
        "0",
        "--yto",
        "4",
        "--window",
        "-3:3",
    ]);
    assert_eq!(stdout(&o), "differ at x=1, y=0\n");
    let o = cagame(&[
        "--json",
        "converge",
        "--spec2",
        zeros.to_str().unwrap(),
        "--yfrom",
        "0",
        "--yto",
        "4",
        "--window",
        "-3:0",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "agree-on-tested");

    let o = cagame(&[
        "--json",
        "search",
        "--pattern",
        "111",
        "--ymax",
        "6",
        "--window",
        "-2:8",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["hits"]
        .as_array()
        .unwrap()
        .contains(&json!({"x": 1, "y": 4, "reversed": false})));
}

async fn service_body(uri: &str, body: Value) -> String {
    let req = Request::builder()
        .method("POST")
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = router(Limits::default()).oneshot(req).await.unwrap();
    String::from_utf8(
        resp.into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec(),
    )
    .unwrap()
}

#[tokio::test]
async fn cli_and_service_agree() {
    let spec = json!({"gamma": 1, "Gamma": 0, "L": "0", "C": "11010011101100", "R": "0", "xi": 0});
    for mp in 0..=6 {
        let args = with(
            RULE110,
            &[
                "--json",
                "solve",
                "--X",
                "6",
                "--Y",
                "2",
                "--mp",
                &mp.to_string(),
            ],
        );
        let cli = cagame(&args.iter().map(String::as_str).collect::<Vec<_>>());
        let http = service_body(
            "/api/game/outcome",
            json!({"spec": spec, "position": {"X": 6, "Y": 2, "mp": mp}}),
        )
        .await;
        assert_eq!(stdout(&cli).trim_end(), http);
    }
    let args = with(
        RULE110,
        &[
            "--json", "evolve", "--x0", "-3", "--x1", "16", "--rows", "8",
        ],
    );
    let cli = cagame(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let http = service_body(
        "/api/ca/window",
        json!({"spec": spec, "x0": -3, "x1": 16, "rows": 8}),
    )
    .await;
    assert_eq!(stdout(&cli).trim_end(), http);

    let args = with(
        RULE110,
        &["--json", "tri-solve", "--x", "4", "--y", "3", "--h", "1"],
    );
    let cli = cagame(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let http = service_body(
        "/api/triangle/outcome",
        json!({"spec": spec, "position": {"x": 4, "y": 3, "h": 1}}),
    )
    .await;
    assert_eq!(stdout(&cli).trim_end(), http);
}

fn rule110_game() -> TakeAway {
    TakeAway::new(
        Params::RULE_110_MIRROR,
        Background::parse("0", "11010011101100", "0", 0).unwrap(),
    )
}

#[test]
fn engine_opens_with_whole_heap() {
    let game = rule110_game();
    let mut out = Vec::new();
    let session = play(&game, Position::new(6, 2, 4), true, &b""[..], &mut out).unwrap();
    assert_eq!(session.transcript, vec![Move::new(6, 2)]);
    assert_eq!(session.winner, Some(Side::Engine));
    assert_eq!(session.verdict, Some(PathVerdict::Optimal));
    assert!(String::from_utf8(out)
        .unwrap()
        .contains("engine plays t=6,m=2"));
}

#[test]
fn play_rejects_illegal_input() {
    let game = rule110_game();
    let mut out = Vec::new();
    let input = "1,2\nbanana\nmoves\n0,1\n";
    let session = play(
        &game,
        Position::new(6, 2, 3),
        false,
        input.as_bytes(),
        &mut out,
    )
    .unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("illegal move (black-token)"));
    assert!(text.contains("t=0,m=1 t=1,m=1"));
    assert_eq!(session.transcript[0], Move::new(0, 1));
    // The engine was handed an N-position and must win.
    assert_eq!(session.winner, Some(Side::Engine));
    assert_eq!(session.verdict, Some(PathVerdict::Optimal));
}

#[test]
fn scripted_session_is_legal_and_engine_replies_win() {
    let game = rule110_game();
    let spec = SpecDocument::from_parts(game.params(), game.tape());
    let start = Position::new(50, 45, 1);
    // Script the human side by replaying the session's policies. The human
    // picks from the offered moves: a winning one when there is one, except
    // every fourth turn, when it hands the engine a winning position.
    let mut pos = start;
    let mut lines = String::new();
    let mut human = true;
    let mut turn = 0;
    loop {
        let offered = api::game_moves(&spec, PositionDoc::from(pos))
            .unwrap()
            .moves;
        if offered.is_empty() {
            break;
        }
        let mv = if human {
            turn += 1;
            let first = Move::from(offered[0]);
            let m = if turn % 4 == 0 {
                first
            } else {
                game.best_move(pos).unwrap_or(first)
            };
            lines.push_str(&format!("{},{}\n", m.tokens, m.matches));
            m
        } else {
            game.best_move(pos).unwrap_or(Move::from(offered[0]))
        };
        pos = game.apply(pos, mv).unwrap();
        human = !human;
    }
    let mut out = Vec::new();
    let session = play(&game, start, false, lines.as_bytes(), &mut out).unwrap();
    assert!(
        session.transcript.len() >= 20,
        "{} moves",
        session.transcript.len()
    );
    let mut pos = start;
    for (i, &mv) in session.transcript.iter().enumerate() {
        let offered = api::game_moves(&spec, PositionDoc::from(pos))
            .unwrap()
            .moves;
        assert!(offered.contains(&mv.into()));
        let next = game.apply(pos, mv).unwrap();
        if i % 2 == 1 && game.outcome(pos) == Outcome::N {
            assert_eq!(game.outcome(next), Outcome::P, "engine reply {i}");
        }
        pos = next;
    }
    assert_eq!(session.verdict, Some(PathVerdict::Optimal));
}

proptest! {
    #[test]
    fn spec_document_round_trip(
        gamma in 0u32..=5,
        big_gamma in 0u32..=5,
        left in "[01]{1,6}",
        center in "[01]{0,8}",
        right in "[01]{1,6}",
        xi in -10i64..=10,
    ) {
        let doc = SpecDocument { gamma, big_gamma, left, center, right, xi };
        let parsed = SpecDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&parsed, &doc);
        let bg = doc.background().unwrap();
        prop_assert_eq!(SpecDocument::from_parts(doc.params(), &bg), doc);
    }

    #[test]
    fn invalid_bits_are_rejected(bad in "[01]{0,3}[2-9a-z][01]{0,3}") {
        let doc = json!({"gamma": 0, "Gamma": 0, "L": "0", "C": bad, "R": "1", "xi": 0});
        let err = SpecDocument::from_json(&doc.to_string()).unwrap_err();
        prop_assert_eq!(err.code, "malformed-spec");
    }
}
