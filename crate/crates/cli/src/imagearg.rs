//! Command-line image and kernel descriptors.
//!
//! Images: `delta:I`, `ramp:START:LEN`, `bgdelta:BG:I:BUMP`,
//! `bgramp:BG:START:LEN:BUMP`, `uniform:V`, or `@path` to a JSON array or a
//! CSV file whose last column holds the values (an optional header is skipped).
//!
//! Kernels: `5bin`, `3bin`, `identity`, or `taps:OFF=W,OFF=W,...`.

use std::fs;
use std::path::Path;

use deblur_core::{
    generate_image, make_kernel_3bin, make_kernel_5bin, BlurKernel, Generator, ImageVec,
};

use crate::error::{HarnessError, Result, SolverContext};

fn parse_num<T: std::str::FromStr>(what: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| HarnessError::Usage(format!("cannot parse {what} from `{s}`")))
}

/// Parses an inline generator. `n` is required for everything except files.
pub fn parse_image(arg: &str, n: Option<usize>) -> Result<ImageVec> {
    if let Some(path) = arg.strip_prefix('@') {
        let image = read_image_file(Path::new(path))?;
        if let Some(n) = n.filter(|&n| n != image.len()) {
            return Err(HarnessError::Usage(format!(
                "{path} holds {} pixels but --n is {n}",
                image.len()
            )));
        }
        return Ok(image);
    }
    let generator = parse_generator(arg)?;
    let n = n.ok_or_else(|| HarnessError::Usage(format!("`{arg}` needs --n")))?;
    generate_image(&generator, n).context(format!("image `{arg}`"))
}

pub fn parse_generator(arg: &str) -> Result<Generator> {
    let parts: Vec<&str> = arg.split(':').collect();
    let bad = || {
        HarnessError::Usage(format!(
            "unrecognized image `{arg}` (expected delta:I, ramp:START:LEN, bgdelta:BG:I:BUMP, bgramp:BG:START:LEN:BUMP, uniform:V or @file)"
        ))
    };
    Ok(match parts.as_slice() {
        ["delta", i] => Generator::Delta {
            index: parse_num("index", i)?,
            height: 1.0,
        },
        ["ramp", start, len] => Generator::Ramp {
            start: parse_num("start", start)?,
            length: parse_num("length", len)?,
            height: 1.0,
        },
        ["bgdelta", bg, i, bump] => Generator::BackgroundPlusDelta {
            background: parse_num("background", bg)?,
            index: parse_num("index", i)?,
            bump: parse_num("bump", bump)?,
        },
        ["bgramp", bg, start, len, bump] => Generator::BackgroundPlusRamp {
            background: parse_num("background", bg)?,
            start: parse_num("start", start)?,
            length: parse_num("length", len)?,
            bump: parse_num("bump", bump)?,
        },
        ["uniform", v] => Generator::Uniform {
            value: parse_num("value", v)?,
        },
        _ => return Err(bad()),
    })
}

pub fn read_image_file(path: &Path) -> Result<ImageVec> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let is_json =
        path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('[');
    let values: Vec<f64> = if is_json {
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            context: path.display().to_string(),
            source,
        })?
    } else {
        parse_csv_column(&text)
            .map_err(|msg| HarnessError::Usage(format!("{}: {msg}", path.display())))?
    };
    ImageVec::new(values).context(path.display().to_string())
}

fn parse_csv_column(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if lineno == 0 => {}
            Err(_) => return Err(format!("line {}: `{field}` is not a number", lineno + 1)),
        }
    }
    Ok(values)
}

pub fn parse_kernel(arg: &str) -> Result<BlurKernel> {
    match arg {
        "5bin" => Ok(make_kernel_5bin()),
        "3bin" => Ok(make_kernel_3bin()),
        "identity" => Ok(BlurKernel::identity()),
        _ => {
            let list = arg.strip_prefix("taps:").ok_or_else(|| {
                HarnessError::Usage(format!(
                    "unrecognized kernel `{arg}` (expected 5bin, 3bin, identity or taps:OFF=W,...)"
                ))
            })?;
            let taps = list
                .split(',')
                .map(|item| {
                    let (off, w) = item
                        .split_once('=')
                        .ok_or_else(|| HarnessError::Usage(format!("tap `{item}` is not OFF=W")))?;
                    Ok((
                        parse_num::<i64>("offset", off)?,
                        parse_num::<f64>("weight", w)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            BlurKernel::from_taps(taps).context(format!("kernel `{arg}`"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_generators() {
        let d = parse_image("delta:5", Some(12)).unwrap();
        assert_eq!(d[5], 1.0);
        assert_eq!(d.sum(), 1.0);
        let r = parse_image("ramp:5:4", Some(12)).unwrap();
        assert_eq!(r.sum(), 4.0);
        let b = parse_image("bgdelta:0.75:5:0.25", Some(12)).unwrap();
        assert_eq!((b[0], b[5]), (0.75, 1.0));
        let p = parse_image("bgramp:0.75:5:3:0.25", Some(12)).unwrap();
        assert_eq!((p[4], p[5], p[7], p[8]), (0.75, 1.0, 1.0, 0.75));
        assert_eq!(
            parse_image("uniform:0.5", Some(4)).unwrap().as_slice(),
            &[0.5; 4]
        );
    }

    #[test]
    fn inline_errors() {
        assert!(matches!(
            parse_image("delta:5", None),
            Err(HarnessError::Usage(_))
        ));
        assert!(matches!(
            parse_image("spike:5", Some(12)),
            Err(HarnessError::Usage(_))
        ));
        assert!(matches!(
            parse_image("delta:x", Some(12)),
            Err(HarnessError::Usage(_))
        ));
        assert!(parse_image("delta:12", Some(12)).is_err());
    }

    #[test]
    fn files() {
        let dir = tempfile::tempdir().unwrap();
        let json = dir.path().join("img.json");
        fs::write(&json, "[0.0, 0.5, 1.0]").unwrap();
        assert_eq!(
            parse_image(&format!("@{}", json.display()), None)
                .unwrap()
                .as_slice(),
            &[0.0, 0.5, 1.0]
        );
        assert!(parse_image(&format!("@{}", json.display()), Some(4)).is_err());

        let csv = dir.path().join("img.csv");
        fs::write(&csv, "i,f\n0,0.25\n1,0.75\n").unwrap();
        assert_eq!(
            parse_image(&format!("@{}", csv.display()), None)
                .unwrap()
                .as_slice(),
            &[0.25, 0.75]
        );
        fs::write(&csv, "0.25\nbad\n").unwrap();
        assert!(parse_image(&format!("@{}", csv.display()), None).is_err());

        let missing = dir.path().join("nope.json");
        assert!(matches!(
            parse_image(&format!("@{}", missing.display()), None),
            Err(HarnessError::Io { .. })
        ));
    }

    #[test]
    fn kernels() {
        assert_eq!(parse_kernel("5bin").unwrap(), make_kernel_5bin());
        assert_eq!(parse_kernel("3bin").unwrap(), make_kernel_3bin());
        let k = parse_kernel("taps:-1=0.25,0=0.5,1=0.25").unwrap();
        assert_eq!(k.weight(-1), 0.25);
        assert!(parse_kernel("taps:0=0.5").is_err());
        assert!(parse_kernel("7bin").is_err());
    }
}
