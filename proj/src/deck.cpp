#include "dpsim/deck.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dpsim {

DeckError::DeckError(const std::string& source, int line, int col, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line_(line), col_(col)
{
}

namespace {

struct Token {
    std::string text;
    int line = 0;
    int col = 0;
};

using Line = std::vector<Token>;

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

/// Splits the text into logical lines of tokens. Comments start with "--" or
/// '#'; a trailing "\" joins the next physical line.
std::vector<Line> tokenize(const std::string& text)
{
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool continued = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::size_t cut = raw.find("--");
        cut = std::min(cut, raw.find('#'));
        if (cut != std::string::npos)
            raw.resize(cut);
        Line toks;
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i])))
                ++i;
            if (i >= raw.size())
                break;
            const std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])))
                ++i;
            toks.push_back({raw.substr(start, i - start), lineno, static_cast<int>(start) + 1});
        }
        const bool cont = !toks.empty() && toks.back().text == "\\";
        if (cont)
            toks.pop_back();
        if (continued && !lines.empty())
            lines.back().insert(lines.back().end(), toks.begin(), toks.end());
        else if (!toks.empty())
            lines.push_back(std::move(toks));
        continued = cont;
    }
    return lines;
}

const std::set<std::string> kSections{"GRID", "ROCK", "FLUID", "SATURATION", "INIT", "WELLS", "SCHEDULE", "SOLVER",
                                      "OUTPUT"};

class Parser {
public:
    Parser(const std::string& text, std::string source) : lines_(tokenize(text)), src_(std::move(source))
    {
        deck_.source = src_;
    }

    SimDeck run();

private:
    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw DeckError(src_, t.line, t.col, msg); }

    double number(const Token& t) const
    {
        double v = 0.0;
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        if (*b == '+')
            ++b;
        const auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || !std::isfinite(v))
            fail(t, "expected a number, found '" + t.text + "'");
        return v;
    }

    int integer(const Token& t) const
    {
        const double v = number(t);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            fail(t, "expected an integer, found '" + t.text + "'");
        return static_cast<int>(v);
    }

    /// Values of a keyword line, with "N*v" repeats expanded.
    std::vector<double> values(const Line& l, std::size_t from = 1) const
    {
        std::vector<double> out;
        for (std::size_t i = from; i < l.size(); ++i) {
            const auto& t = l[i];
            const auto star = t.text.find('*');
            if (star == std::string::npos) {
                out.push_back(number(t));
                continue;
            }
            const int n = integer({t.text.substr(0, star), t.line, t.col});
            if (n <= 0)
                fail(t, "repeat count must be positive");
            const double v = number({t.text.substr(star + 1), t.line, t.col + static_cast<int>(star) + 1});
            out.insert(out.end(), static_cast<std::size_t>(n), v);
        }
        return out;
    }

    void arity(const Line& l, std::size_t lo, std::size_t hi) const
    {
        const std::size_t n = l.size() - 1;
        if (n < lo || n > hi) {
            std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + ".." + std::to_string(hi);
            fail(l[0], l[0].text + " takes " + want + " value(s), got " + std::to_string(n));
        }
    }

    double single(const Line& l)
    {
        arity(l, 1, 1);
        return number(l[1]);
    }

    bool on_off(const Line& l)
    {
        arity(l, 1, 1);
        const auto v = upper(l[1].text);
        if (v != "ON" && v != "OFF")
            fail(l[1], "expected ON or OFF");
        return v == "ON";
    }

    std::size_t well_ref(const Token& t) const
    {
        for (std::size_t w = 0; w < deck_.wells.size(); ++w)
            if (deck_.wells[w].name == t.text)
                return w;
        fail(t, "unknown well '" + t.text + "'");
    }

    void grid_keyword(const Line& l);
    void rock_keyword(const Line& l);
    void fluid_keyword(const Line& l);
    void saturation_keyword(const Line& l, std::size_t& idx);
    void init_keyword(const Line& l);
    void wells_keyword(const Line& l);
    void schedule_keyword(const Line& l);
    void solver_keyword(const Line& l);
    void output_keyword(const Line& l);
    void finish();

    std::vector<Line> lines_;
    std::string src_;
    SimDeck deck_;
    std::map<std::string, Token> seen_;  // first occurrence of each keyword
    std::set<std::string> sections_;
    std::map<std::string, std::vector<double>> arrays_;
    Token eof_{"", 1, 1};
};

void Parser::grid_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    if (kw == "DIMENS") {
        arity(l, 3, 3);
        int* dst[3] = {&deck_.dims.nx, &deck_.dims.ny, &deck_.dims.nz};
        for (int a = 0; a < 3; ++a) {
            const int n = integer(l[static_cast<std::size_t>(a) + 1]);
            if (n <= 0)
                fail(l[0], "DIMENS entries must be positive, got " + l[static_cast<std::size_t>(a) + 1].text);
            *dst[a] = n;
        }
    } else if (kw == "DX" || kw == "DY" || kw == "DZ") {
        auto v = values(l);
        if (v.empty())
            fail(l[0], kw + " needs values");
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!(v[i] > 0.0))
                fail(l[0], kw + " entries must be positive");
        (kw == "DX" ? deck_.dims.dx : kw == "DY" ? deck_.dims.dy : deck_.dims.dz) = std::move(v);
    } else if (kw == "CENTER_DEPTH" || kw == "TOPS") {
        deck_.depth = single(l);
        deck_.center_depth = kw == "CENTER_DEPTH";
    } else if (kw == "GRAVITY") {
        deck_.assembly.gravity = on_off(l);
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in GRID section");
    }
}

void Parser::rock_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    static const std::set<std::string> arrays{"MATRIX_PERMX", "MATRIX_PERMY", "MATRIX_PERMZ", "MATRIX_PORO",
                                              "FRACTURE_PERMX", "FRACTURE_PERMY", "FRACTURE_PERMZ",
                                              "FRACTURE_PORO"};
    if (arrays.count(kw)) {
        auto v = values(l);
        if (v.empty())
            fail(l[0], kw + " needs values");
        for (double x : v)
            if (x < 0.0)
                fail(l[0], kw + " entries must be non-negative");
        arrays_[kw] = std::move(v);
    } else if (kw == "MATRIX_CR") {
        deck_.props.matrix.c_r = single(l);
    } else if (kw == "MATRIX_PREF") {
        deck_.props.matrix.p_ref = single(l);
    } else if (kw == "FRACTURE_CR") {
        deck_.props.fracture.c_r = single(l);
    } else if (kw == "FRACTURE_PREF") {
        deck_.props.fracture.p_ref = single(l);
    } else if (kw == "MODEL") {
        arity(l, 1, 1);
        const auto v = upper(l[1].text);
        if (v == "DUAL")
            deck_.model = ModelKind::Dual;
        else if (v == "SINGLE")
            deck_.model = ModelKind::Single;
        else
            fail(l[1], "MODEL is DUAL or SINGLE");
    } else if (kw == "SHAPE_FACTOR") {
        arity(l, 1, 3);
        const auto v = upper(l[1].text);
        auto& s = deck_.props.shape;
        if (v == "KAZEMI") {
            arity(l, 1, 1);
            s.model = ShapeFactorModel::Kazemi;
        } else if (v == "WARREN_ROOT") {
            s.model = ShapeFactorModel::WarrenRoot;
            if (l.size() > 2) {
                s.fracture_sets = integer(l[2]);
                if (s.fracture_sets < 1 || s.fracture_sets > 3)
                    fail(l[2], "number of fracture sets is 1, 2 or 3");
            }
            if (l.size() > 3) {
                s.representative_l = number(l[3]);
                if (!(s.representative_l > 0.0))
                    fail(l[3], "fracture spacing must be positive");
            }
        } else if (v == "CONSTANT") {
            arity(l, 2, 2);
            s.constant = true;
            s.sigma_value = number(l[2]);
            if (s.sigma_value < 0.0)
                fail(l[2], "shape factor must be non-negative");
        } else {
            fail(l[1], "SHAPE_FACTOR is KAZEMI, WARREN_ROOT [n [L]] or CONSTANT sigma");
        }
    } else if (kw == "FRACTURE_SPACING") {
        arity(l, 3, 3);
        std::array<double, 3> sp{};
        for (std::size_t a = 0; a < 3; ++a) {
            const auto& t = l[a + 1];
            sp[a] = upper(t.text) == "INF" ? kInactiveAxis : number(t);
            if (!(sp[a] > 0.0))
                fail(t, "fracture spacing must be positive");
        }
        arrays_["FRACTURE_SPACING"] = {sp[0], sp[1], sp[2]};
    } else if (kw == "TRANSFER_PERM") {
        arity(l, 1, 1);
        const auto v = upper(l[1].text);
        auto& tp = deck_.props.transfer_perm;
        if (v == "X")
            tp = TransferPerm::X;
        else if (v == "ARITHMETIC")
            tp = TransferPerm::Arithmetic;
        else if (v == "GEOMETRIC")
            tp = TransferPerm::Geometric;
        else if (v == "HARMONIC")
            tp = TransferPerm::Harmonic;
        else
            fail(l[1], "TRANSFER_PERM is X, ARITHMETIC, GEOMETRIC or HARMONIC");
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in ROCK section");
    }
}

void Parser::fluid_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    if (kw != "OIL" && kw != "WATER")
        fail(l[0], "unknown keyword '" + l[0].text + "' in FLUID section");
    arity(l, 5, 6);
    PhasePvt pvt;
    pvt.p_ref = number(l[1]);
    pvt.b_ref = number(l[2]);
    pvt.compressibility = number(l[3]);
    pvt.viscosity = number(l[4]);
    pvt.rho_sc = number(l[5]);
    if (l.size() > 6) {
        const auto f = upper(l[6].text);
        if (f == "EXP")
            pvt.form = FvfForm::Exponential;
        else if (f == "LINEAR")
            pvt.form = FvfForm::Linear;
        else
            fail(l[6], "FVF form is EXP or LINEAR");
    }
    try {
        pvt.validate(kw == "OIL" ? "oil" : "water");
    } catch (const std::exception& e) {
        fail(l[0], e.what());
    }
    (kw == "OIL" ? deck_.fluid.oil : deck_.fluid.water) = pvt;
}

void Parser::saturation_keyword(const Line& l, std::size_t& idx)
{
    const auto kw = upper(l[0].text);
    const bool frac = kw.rfind("FRACTURE_", 0) == 0;
    SatFuncTable& dst = frac ? deck_.frac_table : deck_.matrix_table;
    if (kw == "FRACTURE_TABLE" || kw == "MATRIX_TABLE") {
        arity(l, 0, 0);
        std::vector<SatFuncRow> rows;
        for (++idx;; ++idx) {
            if (idx >= lines_.size())
                fail(l[0], kw + " is not terminated by '/'");
            const Line& r = lines_[idx];
            if (r.size() == 1 && r[0].text == "/")
                break;
            if (r.size() != 4)
                fail(r[0], "table rows are: s_w k_rw k_ro p_cow");
            rows.push_back({number(r[0]), number(r[1]), number(r[2]), number(r[3])});
        }
        try {
            dst = SatFuncTable(std::move(rows));
        } catch (const std::exception& e) {
            fail(l[0], e.what());
        }
    } else if (kw == "FRACTURE_COREY" || kw == "MATRIX_COREY") {
        arity(l, 7, 8);
        CoreyParams c;
        c.swc = number(l[1]);
        c.sor = number(l[2]);
        c.n_w = number(l[3]);
        c.n_o = number(l[4]);
        c.krw_max = number(l[5]);
        c.kro_max = number(l[6]);
        c.pc_max = number(l[7]);
        if (l.size() > 8)
            c.points = integer(l[8]);
        try {
            dst = corey_table(c);
        } catch (const std::exception& e) {
            fail(l[0], e.what());
        }
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in SATURATION section");
    }
}

void Parser::init_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    auto& in = deck_.init;
    if (kw == "PRESSURE_MATRIX")
        in.p_m = single(l);
    else if (kw == "PRESSURE_FRACTURE")
        in.p_f = single(l);
    else if (kw == "SWAT_MATRIX")
        in.s_wm = single(l);
    else if (kw == "SWAT_FRACTURE")
        in.s_wf = single(l);
    else
        fail(l[0], "unknown keyword '" + l[0].text + "' in INIT section");
}

void Parser::wells_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    if (kw == "WELL") {
        arity(l, 2, 2);
        for (const auto& w : deck_.wells)
            if (w.name == l[1].text)
                fail(l[1], "duplicate well '" + l[1].text + "'");
        WellSpec w;
        w.name = l[1].text;
        const auto kind = upper(l[2].text);
        if (kind == "INJECTOR")
            w.kind = WellKind::Injector;
        else if (kind == "PRODUCER")
            w.kind = WellKind::Producer;
        else
            fail(l[2], "well type is INJECTOR or PRODUCER");
        w.bhp_limit = w.kind == WellKind::Injector ? 1e5 : 14.7;
        deck_.wells.push_back(std::move(w));
        return;
    }
    if (l.size() < 2)
        fail(l[0], kw + " needs a well name");
    const std::size_t wi = well_ref(l[1]);
    WellSpec& w = deck_.wells[wi];
    if (kw == "PERF") {
        if (l.size() < 5)
            fail(l[0], "PERF needs: well i j k [options]");
        const int i = integer(l[2]), j = integer(l[3]), k = integer(l[4]);
        const auto& d = deck_.dims;
        if (i < 1 || j < 1 || k < 1 || i > d.nx || j > d.ny || k > d.nz)
            fail(l[2], "perforation (" + l[2].text + " " + l[3].text + " " + l[4].text + ") outside the grid");
        Perforation p;
        p.cell = static_cast<std::size_t>(i - 1) +
                 static_cast<std::size_t>(d.nx) * (static_cast<std::size_t>(j - 1) + static_cast<std::size_t>(d.ny) * (k - 1));
        if ((l.size() - 5) % 2 != 0)
            fail(l.back(), "PERF options come in name/value pairs");
        for (std::size_t t = 5; t < l.size(); t += 2) {
            const auto key = upper(l[t].text);
            const Token& v = l[t + 1];
            auto& g = p.geometry;
            if (key == "WI")
                p.well_index = number(v);
            else if (key == "KH")
                g.k_h = upper(v.text) == "AUTO" ? std::nullopt : std::optional<double>(number(v));
            else if (key == "RW")
                g.r_w = number(v);
            else if (key == "SKIN")
                g.skin = number(v);
            else if (key == "WFRAC")
                g.w_frac = number(v);
            else if (key == "WG")
                g.w_g = number(v);
            else if (key == "RADIUS_MODEL") {
                const auto m = upper(v.text);
                if (m == "PEACEMAN")
                    g.radius_model = RadiusModel::Peaceman;
                else if (m == "CIRCLE")
                    g.radius_model = RadiusModel::Circle;
                else
                    fail(v, "RADIUS_MODEL is PEACEMAN or CIRCLE");
            } else if (key == "DIR") {
                const auto m = upper(v.text);
                if (m == "X")
                    g.direction = Axis::X;
                else if (m == "Y")
                    g.direction = Axis::Y;
                else if (m == "Z")
                    g.direction = Axis::Z;
                else
                    fail(v, "DIR is X, Y or Z");
            } else {
                fail(l[t], "unknown PERF option '" + l[t].text + "'");
            }
        }
        w.perforations.push_back(p);
    } else if (kw == "RATE_MAX") {
        arity(l, 2, 2);
        w.max_rate = number(l[2]);
        if (w.max_rate < 0.0)
            fail(l[2], "rate limit must be non-negative");
    } else if (kw == "BHP_MIN" || kw == "BHP_MAX") {
        arity(l, 2, 2);
        if ((kw == "BHP_MIN") != (w.kind == WellKind::Producer))
            fail(l[0], kw + (w.kind == WellKind::Producer ? " does not apply to a producer" : " does not apply to an injector"));
        w.bhp_limit = number(l[2]);
    } else if (kw == "REF_DEPTH") {
        arity(l, 2, 2);
        w.ref_depth = number(l[2]);
    } else if (kw == "CONTROL") {
        arity(l, 2, 2);
        const auto c = upper(l[2].text);
        if (c == "RATE")
            w.initial_control = WellControl::Rate;
        else if (c == "BHP")
            w.initial_control = WellControl::Bhp;
        else
            fail(l[2], "CONTROL is RATE or BHP");
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in WELLS section");
    }
}

void Parser::schedule_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    if (kw == "END_TIME") {
        deck_.end_time = single(l);
        if (deck_.end_time < 0.0)
            fail(l[1], "END_TIME must be non-negative");
    } else if (kw == "REPORT") {
        auto v = values(l);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double prev = deck_.report_times.empty() ? -1.0 : deck_.report_times.back();
            if (!(v[i] > prev))
                fail(l[0], "report times must be strictly increasing");
            deck_.report_times.push_back(v[i]);
        }
    } else if (kw == "REPORT_EVERY") {
        const double every = single(l);
        if (!(every > 0.0))
            fail(l[1], "REPORT_EVERY must be positive");
        arrays_["REPORT_EVERY"] = {every};
    } else if (kw == "AT") {
        if (l.size() < 5)
            fail(l[0], "AT needs: time keyword well value");
        ScheduleEvent ev;
        ev.time = number(l[1]);
        if (!deck_.events.empty() && ev.time < deck_.events.back().time)
            fail(l[1], "schedule times must be increasing");
        if (ev.time < 0.0)
            fail(l[1], "schedule time must be non-negative");
        const auto what = upper(l[2].text);
        ev.well = well_ref(l[3]);
        if (l.size() != 5)
            fail(l[0], "AT takes exactly: time keyword well value");
        if (what == "RATE_MAX") {
            ev.kind = ScheduleEvent::Kind::RateMax;
            ev.value = number(l[4]);
        } else if (what == "BHP_MIN" || what == "BHP_MAX") {
            ev.kind = ScheduleEvent::Kind::BhpLimit;
            ev.value = number(l[4]);
        } else if (what == "CONTROL") {
            ev.kind = ScheduleEvent::Kind::Control;
            const auto c = upper(l[4].text);
            if (c != "RATE" && c != "BHP")
                fail(l[4], "CONTROL is RATE or BHP");
            ev.control = c == "RATE" ? WellControl::Rate : WellControl::Bhp;
        } else {
            fail(l[2], "AT changes RATE_MAX, BHP_MIN, BHP_MAX or CONTROL");
        }
        deck_.events.push_back(ev);
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in SCHEDULE section");
    }
}

void Parser::solver_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    auto& n = deck_.newton;
    auto& ts = deck_.timestep;
    if (kw == "TOLERANCE") {
        n.epsilon = single(l);
        if (!(n.epsilon > 0.0))
            fail(l[1], "TOLERANCE must be positive");
    } else if (kw == "MAX_NEWTON") {
        arity(l, 1, 1);
        n.max_iters = integer(l[1]);
        if (n.max_iters < 1)
            fail(l[1], "MAX_NEWTON must be at least 1");
    } else if (kw == "FORCING") {
        arity(l, 1, 3);
        const auto r = upper(l[1].text);
        if (r == "EW1") {
            arity(l, 1, 1);
            n.forcing = ForcingRule::ew1();
        } else if (r == "EW2") {
            arity(l, 1, 1);
            n.forcing = ForcingRule::ew2();
        } else if (r == "EW3") {
            n.forcing = ForcingRule::ew3();
            if (l.size() > 2)
                n.forcing.gamma = number(l[2]);
            if (l.size() > 3)
                n.forcing.beta = number(l[3]);
            if (!(n.forcing.gamma >= 0.0 && n.forcing.gamma <= 1.0) || !(n.forcing.beta > 1.0 && n.forcing.beta <= 2.0))
                fail(l[1], "EW3 needs gamma in [0,1] and beta in (1,2]");
        } else if (r == "CONST") {
            arity(l, 2, 2);
            n.forcing = ForcingRule::constant(number(l[2]));
            if (!(n.forcing.value > 0.0 && n.forcing.value < 1.0))
                fail(l[2], "constant forcing must be in (0,1)");
        } else {
            fail(l[1], "FORCING is EW1, EW2, EW3 [gamma beta] or CONST value");
        }
    } else if (kw == "ETA_BOUNDS") {
        arity(l, 2, 2);
        n.eta_min = number(l[1]);
        n.eta_max = number(l[2]);
        if (!(n.eta_min > 0.0 && n.eta_min <= n.eta_max && n.eta_max < 1.0))
            fail(l[1], "ETA_BOUNDS need 0 < eta_min <= eta_max < 1");
    } else if (kw == "ETA_INITIAL") {
        n.eta_initial = single(l);
    } else if (kw == "DT_INIT") {
        ts.dt_init = single(l);
    } else if (kw == "DT_MIN") {
        ts.dt_min = single(l);
    } else if (kw == "DT_MAX") {
        ts.dt_max = single(l);
    } else if (kw == "DT_GROW") {
        ts.grow = single(l);
    } else if (kw == "DT_CUT") {
        ts.cut = single(l);
    } else if (kw == "MAX_CUTS") {
        arity(l, 1, 1);
        ts.max_cuts = integer(l[1]);
    } else if (kw == "MAX_DP") {
        n.max_dp = single(l);
    } else if (kw == "MAX_DS") {
        n.max_ds = single(l);
    } else if (kw == "MB_TOL") {
        n.mb_tol = single(l);
    } else if (kw == "PRECONDITIONER") {
        arity(l, 1, 1);
        const auto v = upper(l[1].text);
        if (v == "CPR")
            n.linear.preconditioner = PreconditionerKind::Cpr;
        else if (v == "ILU")
            n.linear.preconditioner = PreconditionerKind::BlockIlu;
        else
            fail(l[1], "PRECONDITIONER is CPR or ILU");
    } else if (kw == "PRESSURE_SOLVER") {
        arity(l, 1, 1);
        const auto v = upper(l[1].text);
        if (v == "KRYLOV")
            n.linear.cpr.pressure_solver = PressureSolverKind::Krylov;
        else if (v == "ILU0")
            n.linear.cpr.pressure_solver = PressureSolverKind::Ilu0;
        else
            fail(l[1], "PRESSURE_SOLVER is KRYLOV or ILU0");
    } else if (kw == "PRESSURE_MAX_ITERS") {
        arity(l, 1, 1);
        n.linear.cpr.pressure_max_iters = integer(l[1]);
    } else if (kw == "PRESSURE_RTOL") {
        n.linear.cpr.pressure_rtol = single(l);
    } else if (kw == "GMRES_RESTART") {
        arity(l, 1, 1);
        n.linear.restart = integer(l[1]);
    } else if (kw == "GMRES_MAX_ITERS") {
        arity(l, 1, 1);
        n.linear.max_iters = integer(l[1]);
    } else if (kw == "RESIDUAL_SCALING") {
        deck_.assembly.residual_scaling = on_off(l);
    } else if (kw == "DECOUPLE") {
        n.linear.decouple = on_off(l);
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in SOLVER section");
    }
}

void Parser::output_keyword(const Line& l)
{
    const auto kw = upper(l[0].text);
    if (kw == "SNAPSHOT_EVERY") {
        arity(l, 1, 1);
        deck_.snapshot_every = integer(l[1]);
        if (deck_.snapshot_every < 0)
            fail(l[1], "SNAPSHOT_EVERY must be non-negative");
    } else {
        fail(l[0], "unknown keyword '" + l[0].text + "' in OUTPUT section");
    }
}

SimDeck Parser::run()
{
    std::string section;
    for (std::size_t idx = 0; idx < lines_.size(); ++idx) {
        const Line& l = lines_[idx];
        const auto kw = upper(l[0].text);
        if (l.size() == 1 && (kSections.count(kw) || kw == "END")) {
            if (kw == "END")
                break;
            if (sections_.count(kw))
                fail(l[0], "section " + kw + " appears twice");
            if (kw != "GRID" && !sections_.count("GRID"))
                fail(l[0], "GRID section must come first");
            section = kw;
            sections_.insert(kw);
            seen_.emplace(kw, l[0]);
            continue;
        }
        if (section.empty())
            fail(l[0], "keyword '" + l[0].text + "' outside any section");
        if (section != "WELLS" && section != "SCHEDULE" && !(section == "SATURATION") && seen_.count(kw) &&
            kw != "FORCING")
            fail(l[0], "keyword " + kw + " given twice");
        seen_.emplace(kw, l[0]);
        if (section == "GRID")
            grid_keyword(l);
        else if (section == "ROCK")
            rock_keyword(l);
        else if (section == "FLUID")
            fluid_keyword(l);
        else if (section == "SATURATION")
            saturation_keyword(l, idx);
        else if (section == "INIT")
            init_keyword(l);
        else if (section == "WELLS")
            wells_keyword(l);
        else if (section == "SCHEDULE")
            schedule_keyword(l);
        else if (section == "SOLVER")
            solver_keyword(l);
        else
            output_keyword(l);
    }
    if (!lines_.empty())
        eof_ = lines_.back().back();
    finish();
    return std::move(deck_);
}

void Parser::finish()
{
    for (const char* s : {"GRID", "ROCK", "FLUID", "SATURATION", "INIT", "SCHEDULE"})
        if (!sections_.count(s))
            fail(eof_, std::string("missing ") + s + " section");
    auto at = [&](const std::string& kw) { return seen_.count(kw) ? seen_.at(kw) : eof_; };
    auto require = [&](const std::string& kw, const std::string& section) {
        if (!seen_.count(kw))
            fail(seen_.at(section), "missing " + kw + " in " + section + " section");
    };
    auto& d = deck_.dims;
    require("DIMENS", "GRID");
    require("DX", "GRID");
    require("DY", "GRID");
    require("DZ", "GRID");
    auto check_len = [&](const std::vector<double>& v, int n, const std::string& kw) {
        if (v.size() != 1 && v.size() != static_cast<std::size_t>(n))
            fail(at(kw), kw + " has " + std::to_string(v.size()) + " entries, expected 1 or " + std::to_string(n));
    };
    check_len(d.dx, d.nx, "DX");
    check_len(d.dy, d.ny, "DY");
    check_len(d.dz, d.nz, "DZ");
    for (auto [v, n] : {std::pair{&d.dx, d.nx}, std::pair{&d.dy, d.ny}, std::pair{&d.dz, d.nz}})
        if (v->size() == 1)
            v->assign(static_cast<std::size_t>(n), v->front());
    if (!seen_.count("CENTER_DEPTH") && !seen_.count("TOPS"))
        deck_.log.push_back("depth not given; layer 1 center at 0 ft");

    const std::size_t n = deck_.num_cells();
    const bool dual = deck_.model == ModelKind::Dual;
    auto cell_array = [&](const std::string& kw, std::vector<double>& dst, bool required, double fallback) {
        if (!arrays_.count(kw)) {
            if (required)
                fail(seen_.at("ROCK"), "missing " + kw + " in ROCK section");
            dst.assign(n, fallback);
            return;
        }
        const auto& v = arrays_.at(kw);
        if (v.size() != 1 && v.size() != n)
            fail(at(kw), kw + " has " + std::to_string(v.size()) + " entries, expected 1 or " + std::to_string(n));
        dst = v.size() == 1 ? std::vector<double>(n, v[0]) : v;
    };
    auto& fr = deck_.props.fracture;
    auto& mx = deck_.props.matrix;
    cell_array("FRACTURE_PERMX", fr.perm_x, true, 0.0);
    cell_array("FRACTURE_PERMY", fr.perm_y, false, 0.0);
    if (!arrays_.count("FRACTURE_PERMY"))
        fr.perm_y = fr.perm_x;
    cell_array("FRACTURE_PERMZ", fr.perm_z, false, 0.0);
    if (!arrays_.count("FRACTURE_PERMZ"))
        fr.perm_z = fr.perm_x;
    cell_array("FRACTURE_PORO", fr.phi_ref, true, 0.0);
    cell_array("MATRIX_PERMX", mx.perm_x, dual, 0.0);
    cell_array("MATRIX_PERMY", mx.perm_y, false, 0.0);
    if (!arrays_.count("MATRIX_PERMY"))
        mx.perm_y = mx.perm_x;
    cell_array("MATRIX_PERMZ", mx.perm_z, false, 0.0);
    if (!arrays_.count("MATRIX_PERMZ"))
        mx.perm_z = mx.perm_x;
    cell_array("MATRIX_PORO", mx.phi_ref, dual, 0.0);
    if (!dual && !arrays_.count("MATRIX_PORO")) {
        // the matrix is inert in single-porosity runs; give it valid rock
        mx = fr;
        deck_.log.push_back("MODEL SINGLE: matrix rock copied from the fracture");
    }
    for (std::size_t c = 0; c < n; ++c)
        if (fr.phi_ref[c] > 1.0 || mx.phi_ref[c] > 1.0)
            fail(at(fr.phi_ref[c] > 1.0 ? "FRACTURE_PORO" : "MATRIX_PORO"), "porosity above 1");
    if (arrays_.count("FRACTURE_SPACING")) {
        const auto& sp = arrays_.at("FRACTURE_SPACING");
        deck_.props.frac_spacing.assign(n, {sp[0], sp[1], sp[2]});
    }

    if (!seen_.count("OIL"))
        fail(seen_.at("FLUID"), "missing OIL in FLUID section");
    if (!seen_.count("WATER")) {
        deck_.fluid.water = PhasePvt{deck_.fluid.oil.p_ref, 1.0, 3e-6, 1.0, 62.4, FvfForm::Exponential};
        deck_.log.push_back("WATER not given; using B=1, c_w=3e-6 1/psi, mu=1 cp, rho=62.4 lbm/ft3");
    }

    if (deck_.frac_table.empty())
        fail(seen_.at("SATURATION"), "missing fracture saturation table");
    if (deck_.matrix_table.empty()) {
        if (dual)
            fail(seen_.at("SATURATION"), "missing matrix saturation table");
        deck_.matrix_table = deck_.frac_table;
    }

    for (const char* kw : {"PRESSURE_FRACTURE", "SWAT_FRACTURE"})
        require(kw, "INIT");
    if (dual) {
        require("PRESSURE_MATRIX", "INIT");
        require("SWAT_MATRIX", "INIT");
    } else {
        if (!seen_.count("PRESSURE_MATRIX"))
            deck_.init.p_m = deck_.init.p_f;
        if (!seen_.count("SWAT_MATRIX"))
            deck_.init.s_wm = deck_.init.s_wf;
    }

    for (const auto& w : deck_.wells)
        if (w.perforations.empty())
            fail(seen_.at("WELLS"), "well " + w.name + " has no perforations");

    require("END_TIME", "SCHEDULE");
    if (!deck_.report_times.empty() && deck_.report_times.back() > deck_.end_time)
        fail(at("REPORT"), "report time after END_TIME");
    if (arrays_.count("REPORT_EVERY")) {
        const double every = arrays_.at("REPORT_EVERY")[0];
        std::vector<double> t = deck_.report_times;
        for (int k = 1; k * every <= deck_.end_time * (1.0 + 1e-12); ++k)
            t.push_back(std::min(k * every, deck_.end_time));
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        deck_.report_times = std::move(t);
    }
    for (const auto& ev : deck_.events)
        if (ev.time > deck_.end_time)
            fail(at("AT"), "schedule event after END_TIME");

    try {
        deck_.timestep.validate();
    } catch (const std::exception& e) {
        fail(at(seen_.count("DT_INIT") ? "DT_INIT" : "SOLVER"), e.what());
    }
}

}  // namespace

SimDeck parse_deck_string(const std::string& text, const std::string& source)
{
    return Parser(text, source).run();
}

SimDeck parse_deck(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DeckError(path, 0, 0, "cannot open deck file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_deck_string(ss.str(), path);
}

Grid build_deck_grid(const SimDeck& deck)
{
    GridDims dims = deck.dims;
    const double dz0 = dims.dz.front();
    dims.top_depth = deck.center_depth ? deck.depth - 0.5 * dz0 : deck.depth;
    Grid g = build_grid(dims, deck.props);
    return g;
}

std::vector<Well> build_deck_wells(const SimDeck& deck, const Grid& grid)
{
    std::vector<Well> wells;
    for (const auto& spec : deck.wells)
        wells.push_back(make_well(spec, grid));
    return wells;
}

State initialize(const SimDeck& deck, std::vector<std::string>* log)
{
    auto clamp_sat = [&](double s, const SatFuncTable& t, const char* what) {
        const double c = std::clamp(s, t.s_min(), t.s_max());
        if (c != s && log)
            log->push_back(std::string("initial ") + what + " saturation " + std::to_string(s) +
                           " outside the table range; clamped to " + std::to_string(c));
        return c;
    };
    const std::size_t n = deck.num_cells();
    State x(n, deck.wells.size());
    const double s_wf = clamp_sat(deck.init.s_wf, deck.frac_table, "fracture");
    const double s_wm = deck.model == ModelKind::Dual ? clamp_sat(deck.init.s_wm, deck.matrix_table, "matrix")
                                                      : deck.init.s_wm;
    for (std::size_t c = 0; c < n; ++c) {
        x.p_f(c) = deck.init.p_f;
        x.s_wf(c) = s_wf;
        x.p_m(c) = deck.init.p_m;
        x.s_wm(c) = s_wm;
    }
    for (std::size_t w = 0; w < deck.wells.size(); ++w)
        x.bhp[w] = x.p_f(deck.wells[w].perforations.front().cell);
    return x;
}

}  // namespace dpsim
