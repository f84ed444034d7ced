use std::path::Path;

use anyhow::{Context, Result};
use dcv_core::deident::{deidentify_file, strip_pixel_data, DeidentProfile};
use dcv_core::DicomFile;

use super::EXIT_OK;

pub fn cmd_deident(
    input: &Path,
    output: &Path,
    keep_pixels: bool,
    profile_path: Option<&Path>,
) -> Result<i32> {
    let bytes =
        std::fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let file = dcv_core::parse_file(&bytes).context("not a parseable Part-10 file")?;

    let profile = match profile_path {
        Some(path) => DeidentProfile::from_file(path)
            .with_context(|| format!("cannot load profile {}", path.display()))?,
        None => DeidentProfile::standard(),
    };

    let (deidentified, notices) = deidentify_file(&file, &profile);
    for notice in notices {
        eprintln!("deident notice: {notice}");
    }
    let result = if keep_pixels {
        deidentified
    } else {
        DicomFile {
            data: strip_pixel_data(&deidentified.data),
            meta: deidentified.meta,
        }
    };

    let out_bytes = result.to_bytes().context("cannot serialize output")?;
    std::fs::write(output, &out_bytes)
        .with_context(|| format!("cannot write {}", output.display()))?;

    let delta = out_bytes.len() as i64 - bytes.len() as i64;
    println!(
        "{} bytes in, {} bytes out ({}{})",
        bytes.len(),
        out_bytes.len(),
        if delta >= 0 { "+" } else { "" },
        delta
    );
    Ok(EXIT_OK)
}
