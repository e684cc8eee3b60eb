#ifndef DPSIM_DECK_HPP
#define DPSIM_DECK_HPP

#include "dpsim/assembly.hpp"
#include "dpsim/grid.hpp"
#include "dpsim/newton.hpp"
#include "dpsim/props.hpp"
#include "dpsim/timestep.hpp"
#include "dpsim/wells.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dpsim {

/// Parse or validation error with its source location (1-based).
class DeckError : public std::runtime_error {
public:
    DeckError(const std::string& source, int line, int col, const std::string& msg);
    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_, col_;
};

enum class ModelKind { Dual, Single };

struct InitialConditions {
    double p_f = 0.0, p_m = 0.0;    // psi
    double s_wf = 0.0, s_wm = 0.0;
};

/// A well limit or control change that takes effect at `time`.
struct ScheduleEvent {
    enum class Kind { RateMax, BhpLimit, Control };
    double time = 0.0;
    std::size_t well = 0;
    Kind kind = Kind::RateMax;
    double value = 0.0;
    WellControl control = WellControl::Rate;
};

struct SimDeck {
    std::string source;  // file name used in messages
    GridDims dims;
    CellProps props;
    bool center_depth = true;  // depth keyword gave the cell center of layer 1
    double depth = 0.0;
    ModelKind model = ModelKind::Dual;
    AssemblyOptions assembly;
    FluidProps fluid;
    SatFuncTable frac_table, matrix_table;
    std::vector<WellSpec> wells;
    InitialConditions init;
    double end_time = 0.0;             // day
    std::vector<double> report_times;  // day, increasing
    std::vector<ScheduleEvent> events; // ordered by time
    NewtonConfig newton;
    TimestepControls timestep;
    int snapshot_every = 0;
    std::vector<std::string> log;      // defaults applied, clamps

    std::size_t num_cells() const
    {
        return static_cast<std::size_t>(dims.nx) * static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(dims.nz);
    }
};

SimDeck parse_deck_string(const std::string& text, const std::string& source = "<deck>");
SimDeck parse_deck(const std::string& path);

/// Grid with depths placed according to the deck's depth convention.
Grid build_deck_grid(const SimDeck& deck);

/// Well objects with resolved indices.
std::vector<Well> build_deck_wells(const SimDeck& deck, const Grid& grid);

/// Constant initial state; well BHPs start at the pressure of their first
/// perforated fracture cell. Saturations outside the table ranges are clamped
/// and noted in `log`.
State initialize(const SimDeck& deck, std::vector<std::string>* log = nullptr);

}  // namespace dpsim

#endif
