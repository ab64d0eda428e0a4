use fatk_web::{check_value, normalize_value, validity_value};

#[test]
fn normalize_reports_each_step() {
    let v = normalize_value("(/\\Z. \\x:Z. x) @X c{X}", 100);
    assert_eq!(v["ok"], true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    assert_eq!(v["steps"][0]["rule"], "beta-atom");
    assert_eq!(v["result"], "c{X}");

    let w = normalize_value("(\\x. x x) (\\x. x x)", 10);
    assert_eq!(w["normalized"], false);
    assert_eq!(normalize_value("(\\x. x", 10)["ok"], false);
    assert_eq!(normalize_value("x", 0)["ok"], false);
}

#[test]
fn check_and_infer() {
    let c = check_value("x:X |- x : X");
    assert_eq!(
        (c["mode"].as_str(), c["derivable"].as_bool()),
        (Some("check"), Some(true))
    );

    let n = check_value("|- c{X} : Y");
    assert_eq!(n["derivable"], false);

    let i = check_value("f:X -> Y, x:X |- f x");
    assert_eq!(
        (i["mode"].as_str(), i["formula"].as_str()),
        (Some("infer"), Some("Y"))
    );
}

#[test]
fn validity_verdicts() {
    assert_eq!(
        validity_value("|- \\x. x : X -> X", "E", "X", 5, 6)["status"],
        "Certified"
    );
    assert_eq!(
        validity_value("|- c{X -> Y} : X -> Y", "E", "X, Y", 5, 6)["status"],
        "Refuted"
    );
    assert_eq!(
        validity_value("x:X |- x : X", "I", "", 5, 6)["status"],
        "Certified"
    );
    assert_eq!(validity_value("x:X |- x : X", "Q", "", 5, 6)["ok"], false);
    assert_eq!(validity_value("x:X |- x : X", "E", "x", 5, 6)["ok"], false);
}
