use std::fs;
use std::path::Path;

use qrk_core::problem::{
    build_system, write_csv_column, write_index_column, write_matrix_market, CorruptionModel,
    MatrixModel, SupportSize,
};
use serde_json::json;

use crate::args::GenerateArgs;
use crate::{CmdError, CmdResult, EXIT_OK};

pub const MATRIX_FILE: &str = "A.mtx";
pub const RHS_FILE: &str = "b.csv";
pub const CLEAN_RHS_FILE: &str = "b_clean.csv";
pub const X_STAR_FILE: &str = "x_star.csv";
pub const SUPPORT_FILE: &str = "support.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn run(args: &GenerateArgs) -> CmdResult<i32> {
    let model = MatrixModel {
        kind: args.model.kind(),
        rows: args.rows,
        cols: args.cols,
        seed: args.seed,
    };
    let corruption = CorruptionModel {
        kind: args.corruption.0,
        support: SupportSize::Fraction(args.beta),
    };
    model.validate()?;
    corruption.validate()?;
    let system = build_system(&model, &corruption)?;

    let dir = &args.out;
    fs::create_dir_all(dir)
        .map_err(|e| CmdError::failure(format!("cannot create {}: {e}", dir.display())))?;
    write_matrix_market(&dir.join(MATRIX_FILE), &system.a)?;
    write_csv_column(&dir.join(RHS_FILE), &system.b)?;
    write_csv_column(&dir.join(CLEAN_RHS_FILE), &system.b_clean)?;
    write_csv_column(&dir.join(X_STAR_FILE), &system.x_star)?;
    write_index_column(&dir.join(SUPPORT_FILE), &system.corrupt_support)?;

    // Everything needed to regenerate the directory, plus the corrupted row
    // indices for convenience. Deliberately no timestamps or host details.
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "model": args.model.to_string(),
        "rows": args.rows,
        "cols": args.cols,
        "beta": args.beta,
        "corruption": args.corruption.to_string(),
        "seed": args.seed,
        "corrupted_rows": system.corrupt_support.len(),
        "support": system.corrupt_support,
        "files": {
            "matrix": MATRIX_FILE,
            "rhs": RHS_FILE,
            "clean_rhs": CLEAN_RHS_FILE,
            "x_star": X_STAR_FILE,
            "support": SUPPORT_FILE,
        },
    });
    write_manifest(&dir.join(MANIFEST_FILE), &manifest)?;

    println!(
        "wrote {}x{} {} system ({} corrupted rows) to {}",
        args.rows,
        args.cols,
        args.model,
        system.corrupt_support.len(),
        dir.display()
    );
    Ok(EXIT_OK)
}

fn write_manifest(path: &Path, manifest: &serde_json::Value) -> CmdResult<()> {
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CmdError::failure(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| CmdError::failure(format!("cannot write {}: {e}", path.display())))
}
