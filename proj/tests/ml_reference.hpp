// Generated by tools/oracles/gen_ml_reference.py. Do not edit by hand.
// Each value is a partial sum of the defining series carried in arbitrary
// precision with a geometric tail bound below 1e-30 relative, rounded to
// the nearest double.
#pragma once

namespace mlref {

struct Entry { double alpha, beta, z, value; };

inline constexpr Entry table[] = {
    {0.5, 1.0, -0.0, 1.0},
    {0.5, 1.0, -1.0, 0.427583576155807},
    {0.5, 1.0, -2.0, 0.25539567631050575},
    {0.5, 1.0, -3.0, 0.17900115118138996},
    {0.5, 1.0, -4.0, 0.13699945762506138},
    {0.5, 1.0, -5.0, 0.11070463773306863},
    {0.5, 1.0, -6.0, 0.09277656780053835},
    {0.5, 1.0, -7.0, 0.07980005432915294},
    {0.5, 1.0, -8.0, 0.06998516620088092},
    {0.5, 1.0, -9.0, 0.06230772403777468},
    {0.5, 1.0, -10.0, 0.05614099274382259},
    {0.5, 1.0, -11.0, 0.051080594758088446},
    {0.5, 1.0, -12.0, 0.04685422101489376},
    {0.5, 1.0, -13.0, 0.043271921864609694},
    {0.5, 1.0, -14.0, 0.04019722865021846},
    {0.5, 1.0, -15.0, 0.03752960638850576},
    {0.5, 1.0, -16.0, 0.03519337782493084},
    {0.5, 1.0, -17.0, 0.03313049999972554},
    {0.5, 1.0, -18.0, 0.03129571781590521},
    {0.5, 1.0, -19.0, 0.029653230641262164},
    {0.5, 1.0, -20.0, 0.02817434874105132},
    {0.5, 1.0, -25.0, 0.02254957243264136},
    {0.5, 1.0, -30.0, 0.01879588886141675},
    {0.5, 1.0, -40.0, 0.014100335983377814},
    {0.5, 1.0, -50.0, 0.011281536265323773},
    {0.5, 1.0, -0.5, 0.6156903441929259},
    {0.5, 1.0, 0.25, 1.358642370104722},
    {0.5, 1.0, 1.0, 5.008980080762283},
    {0.5, 1.0, 2.0, 108.94090438997797},
    {0.5, 1.0, 4.0, 17772220.904016286},
    {1.0, 1.0, -5.0, 0.006737946999085467},
    {1.0, 1.0, -1.0, 0.36787944117144233},
    {1.0, 1.0, 1.0, 2.718281828459045},
    {0.1, 1.0, -1.0, 0.4855644643110821},
    {0.25, 1.0, -1.0, 0.4638527608017133},
    {0.3, 1.0, -1.0, 0.45659440832969067},
    {0.4, 1.0, -1.0, 0.4420633596852235},
    {0.6, 1.0, -1.0, 0.4133273409431063},
    {0.75, 1.0, -1.0, 0.39310830281575404},
    {0.8, 1.0, -1.0, 0.38694857861897686},
    {0.9, 1.0, -1.0, 0.3760660214246419},
    {0.95, 1.0, -1.0, 0.3715736200306788},
    {0.999, 1.0, -1.0, 0.36794468034194144},
    {1.1, 1.0, -1.0, 0.36338701765922066},
    {1.5, 1.0, -1.0, 0.39662936531808807},
    {1.9, 1.0, -1.0, 0.5064595543685907},
    {0.1, 1.0, -2.0, 0.3200153359597274},
    {0.1, 1.0, -2.5, 0.27335667076010756},
    {0.25, 1.0, -4.0, 0.17291766990277474},
    {0.25, 1.0, -6.0, 0.12159223844551911},
    {0.25, 1.0, -8.0, 0.09372411066560701},
    {0.25, 1.0, -10.0, 0.07623703523972164},
    {0.3, 1.0, -5.0, 0.13708086902027064},
    {0.3, 1.0, -12.0, 0.06113591599651946},
    {0.3, 1.0, -20.0, 0.03740622621388445},
    {0.4, 1.0, -15.0, 0.04375329966689724},
    {0.4, 1.0, -30.0, 0.022135442378833813},
    {0.4, 1.0, -50.0, 0.013341638451394954},
    {0.6, 1.0, -8.0, 0.058609742636332035},
    {0.6, 1.0, -20.0, 0.022946564273258377},
    {0.6, 1.0, -50.0, 0.009083744773103454},
    {0.75, 1.0, -35.0, 0.008116655760466612},
    {0.75, 1.0, -50.0, 0.0056311878629451305},
    {0.8, 1.0, -50.0, 0.004467776157902993},
    {0.9, 1.0, -50.0, 0.0021753530768569766},
    {0.95, 1.0, -30.0, 0.00182777467892355},
    {0.999, 1.0, -10.0, 0.0001758483459087115},
    {0.999, 1.0, -50.0, 2.0862972463840575e-05},
    {1.1, 1.0, -10.0, -0.013146977309068887},
    {1.1, 1.0, -30.0, -0.0033785624239366426},
    {1.5, 1.0, -10.0, -0.10971305425274015},
    {1.5, 1.0, -50.0, -0.004578385105839278},
    {1.9, 1.0, -50.0, 0.022022145114234577},
    {0.3, 1.0, 2.0, 79485.90762518349},
    {0.8, 1.0, 10.0, 66050994.884096},
    {0.5, 1.0, 9.0, 3.0121946291700612e+35},
    {1.0, 2.0, 1.0, 1.7182818284590453},
    {0.5, 0.5, -3.0, 0.027186130003586436},
    {0.5, 0.5, -20.0, 0.0007026087267299006},
    {0.5, 1.5, -3.0, 0.2736662829395367},
    {0.5, 1.5, -20.0, 0.04859128256294743},
    {0.5, 1.5, 2.0, 53.97045219498899},
    {0.5, 2.0, -10.0, 0.10339932663698949},
    {0.5, 2.5, -10.0, 0.08966006733630105},
    {0.5, 3.2, -15.0, 0.03943049628025057},
    {0.3, 1.3, -5.0, 0.17258382619594587},
    {0.6, 2.0, -15.0, 0.07138967486435688},
    {0.75, 0.75, -10.0, 0.00254344315296682},
    {0.8, 1.8, -30.0, 0.033080804640026024},
    {0.9, 1.2, -40.0, 0.00853286586670387},
    {0.7, 1.0, 5.0, 30419.819802049464},
    {1.1, 2.0, -25.0, 0.03772802366186923},
    {1.5, 2.5, -30.0, 0.033815674161136865},
};

inline constexpr int count = 93;

} // namespace mlref
