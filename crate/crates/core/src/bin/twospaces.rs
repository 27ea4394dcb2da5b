// SPDX-License-Identifier: MIT OR Apache-2.0

fn main() {
    let stdin = std::io::stdin();
    let code = twospaces::cli::dispatch(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
