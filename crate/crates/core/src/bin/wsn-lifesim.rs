fn main() {
    let code = wsn_lifesim::cli::main_with(
        std::env::args().skip(1),
        std::env::var_os("WSN_LIFESIM_OUT"),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
